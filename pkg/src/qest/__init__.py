"""Attainable Cramer-Rao bounds for two-parameter estimation with pure quantum probes."""
from .bound import BoundResult, cmi, cmi_for_model, cmi_from_fisher
from .canonical import StandardForm, standard_form, to_standard_form
from .estimator import MostInformativeBound
from .exceptions import ModelError, ModelNotRegular, SingularModel, WrongBranchError
from .measurement import (
    Cfim, Povm, branciard_measurement, classical_fisher, optimal_measurement_for_weight,
    regret_check,
)
from .mixed import MixedModel, cstar, purify
from .statmodel import FisherPair, PureModel, fisher_pair, gauge_fix, sld_pure

__version__ = "0.1.0"

__all__ = [
    "BoundResult",
    "Cfim",
    "FisherPair",
    "MixedModel",
    "ModelError",
    "ModelNotRegular",
    "MostInformativeBound",
    "Povm",
    "PureModel",
    "SingularModel",
    "StandardForm",
    "WrongBranchError",
    "branciard_measurement",
    "classical_fisher",
    "cmi",
    "cmi_for_model",
    "cmi_from_fisher",
    "cstar",
    "fisher_pair",
    "gauge_fix",
    "optimal_measurement_for_weight",
    "purify",
    "regret_check",
    "sld_pure",
    "standard_form",
    "to_standard_form",
]
