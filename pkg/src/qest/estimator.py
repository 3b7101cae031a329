"""scikit-learn style wrapper around the bound and measurement pipeline."""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_weight
from .canonical import to_standard_form
from .measurement import Povm, classical_fisher, optimal_measurement_for_weight
from .mixed import MixedModel, cstar
from .statmodel import PureModel, fisher_pair

__all__ = ["MostInformativeBound"]


class MostInformativeBound(BaseEstimator):
    """Most informative Cramer-Rao bound and an optimal measurement for one model.

    Parameters
    ----------
    weight : array_like of shape (2, 2), optional
        Overrides the weight carried by the model passed to :meth:`fit`.
    phi : float, optional
        Boundary angle for the constructed measurement; ``None`` picks the
        optimum for the weight.

    Attributes
    ----------
    fisher_ : FisherPair
    bound_ : BoundResult
    povm_ : Povm or None
        ``None`` for mixed models, whose bound is not attainable in general.
    c_mi_, c_sld_ : float

    Examples
    --------
    >>> from qest import standard_form
    >>> est = MostInformativeBound().fit(standard_form(0.3).as_model())
    >>> round(est.c_mi_, 6)
    2.191378
    """

    def __init__(self, weight=None, phi=None):
        self.weight = weight
        self.phi = phi

    def fit(self, X, y=None):
        """Evaluate the bound for ``X`` (a :class:`PureModel` or :class:`MixedModel`)."""
        model = X
        if self.weight is not None:
            W = check_weight(self.weight)
            if isinstance(model, PureModel):
                model = model.with_weight(W)
            elif isinstance(model, MixedModel):
                model = MixedModel(model.rho, model.drho, W)
        if isinstance(model, MixedModel):
            self.bound_ = cstar(model)
            self.povm_ = None
            self.fisher_ = None
        elif isinstance(model, PureModel):
            self.fisher_ = fisher_pair(model)
            self.povm_, self.bound_ = optimal_measurement_for_weight(model, self.phi)
            self.standard_form_, self.record_ = to_standard_form(model)
        else:
            raise TypeError(f"expected PureModel or MixedModel, got {type(X).__name__}")
        self.model_ = model
        self.c_mi_ = self.bound_.value
        self.c_sld_ = self.bound_.c_sld
        return self

    def transform(self, X):
        """Eigenvalues ``(mu, nu)`` of ``J^{-1/2} F J^{-1/2}`` for each POVM, descending.

        Every row lies in the unit square, inside the region cut out by the
        Fisher-information inequality.
        """
        check_is_fitted(self, "bound_")
        if not isinstance(self.model_, PureModel):
            raise TypeError("transform needs a pure model")
        povms = [X] if isinstance(X, Povm) else list(X)
        out = np.empty((len(povms), 2))
        for i, povm in enumerate(povms):
            out[i] = np.linalg.eigvalsh(classical_fisher(povm, self.model_).G)[::-1]
        return out
