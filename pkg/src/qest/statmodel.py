"""Local pure-state models: Fisher information, incompatibility and SLD operators.

A model is described entirely at the true parameter value by the probe
``psi0``, its two partial derivatives and a 2x2 weight matrix.
"""
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_derivatives, check_state, check_weight
from .exceptions import ModelError, SingularModel
from .tolerances import BETA_MAX_EXCESS, BETA_SNAP, DET_J_MIN, GAUGE_TOL

__all__ = [
    "PureModel",
    "FisherPair",
    "gauge_fix",
    "sld_pure",
    "fisher_pair",
    "weakly_commuting_check",
    "lyapunov_residual",
]


@dataclass(frozen=True, eq=False)
class PureModel:
    """Probe state and its derivatives at the true parameter value.

    Parameters
    ----------
    psi0 : array-like of complex, shape (d,)
        Normalised probe state.
    dpsi : array-like of complex, shape (2, d)
        Partial derivatives of the probe with respect to the two parameters.
    weight : array-like, shape (2, 2), optional
        Symmetric positive-semidefinite weight matrix; identity by default.
    """

    psi0: np.ndarray
    dpsi: np.ndarray
    weight: np.ndarray = field(default=None)

    def __post_init__(self):
        psi0 = check_state(self.psi0)
        object.__setattr__(self, "psi0", psi0)
        object.__setattr__(self, "dpsi", check_derivatives(self.dpsi, psi0.size))
        object.__setattr__(self, "weight", check_weight(self.weight))

    @property
    def dim(self):
        return self.psi0.size

    def with_weight(self, weight):
        return PureModel(self.psi0, self.dpsi, weight)


@dataclass(frozen=True, eq=False)
class FisherPair:
    """Quantum Fisher information ``J`` and its antisymmetric partner ``Jtilde``."""

    J: np.ndarray
    Jtilde: np.ndarray
    beta: float

    @property
    def eta(self):
        return 0.5 * np.arcsin(self.beta)

    @property
    def chi(self):
        """Normalised commutator expectation J~12 / sqrt(J11 J22)."""
        return self.Jtilde[0, 1] / np.sqrt(self.J[0, 0] * self.J[1, 1])


def gauge_fix(model):
    """Remove the component of each derivative along the probe state."""
    overlaps = model.dpsi @ model.psi0.conj()
    dpsi = model.dpsi - np.outer(overlaps, model.psi0)
    return PureModel(model.psi0, dpsi, model.weight)


def _is_gauge_fixed(model, tol=GAUGE_TOL):
    return np.max(np.abs(model.dpsi @ model.psi0.conj())) <= tol


def sld_pure(model, j):
    """SLD operator ``2(|d_j psi><psi| + |psi><d_j psi|)`` of a gauge-fixed model."""
    if j not in (0, 1):
        raise ValueError(f"parameter index must be 0 or 1, got {j}")
    if not _is_gauge_fixed(model):
        raise ModelError("sld_pure needs a gauge-fixed model; call gauge_fix first")
    d = model.dpsi[j]
    psi = model.psi0
    return 2.0 * (np.outer(d, psi.conj()) + np.outer(psi, d.conj()))


def lyapunov_residual(rho, drho, sld):
    """Max-entry residual of ``drho - (rho L + L rho) / 2``."""
    return np.max(np.abs(drho - 0.5 * (rho @ sld + sld @ rho)))


def _gram(model):
    # <d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>
    dpsi, psi = model.dpsi, model.psi0
    inner = dpsi.conj() @ dpsi.T
    proj = dpsi.conj() @ psi
    return inner - np.outer(proj, proj.conj())


def beta_from(J, Jtilde, det=None):
    """Incompatibility coefficient from a Fisher pair, snapped onto ``[0, 1]``.

    ``det`` may supply a more accurate ``det J`` than the 2x2 determinant.
    """
    det = np.linalg.det(J) if det is None else det
    if det < DET_J_MIN:
        raise SingularModel(f"det J = {det:.3e} below {DET_J_MIN:.0e}")
    beta = abs(Jtilde[0, 1]) / np.sqrt(det)
    if beta > 1.0 + BETA_MAX_EXCESS:
        raise ModelError(f"inconsistent Fisher pair: beta = {beta!r} > 1")
    if beta > 1.0 - BETA_SNAP:
        beta = 1.0
    return float(beta)


def _stable_det_j(model):
    """``det J = 16 det(Re G)`` via ``det(Re G) = det G + (Im G_12)^2``.

    The complex Gram determinant ``det G`` comes from Gram-Schmidt and is
    non-negative by construction, so ``beta <= 1`` holds exactly even when
    the derivatives are nearly parallel (qubits have ``det G = 0``).
    """
    psi = model.psi0
    d1, d2 = (d - psi * (psi.conj() @ d) for d in model.dpsi)
    n1 = float(np.real(d1.conj() @ d1))
    gram_det = 0.0
    if n1 > 0:
        w = d2 - d1 * ((d1.conj() @ d2) / n1)
        gram_det = n1 * float(np.real(w.conj() @ w))
    im12 = float(np.imag(d1.conj() @ d2))
    return 16.0 * (gram_det + im12**2)


def fisher_pair(model):
    """Return ``J = 4 Re G`` and ``Jtilde = 4 Im G`` for the projected Gram matrix ``G``.

    Raises
    ------
    SingularModel
        If ``det J`` is below the identifiability threshold.
    """
    g = 4.0 * _gram(model)
    J = g.real
    J = 0.5 * (J + J.T)
    Jt = g.imag
    Jt = 0.5 * (Jt - Jt.T)
    return FisherPair(J, Jt, beta_from(J, Jt, _stable_det_j(model)))


def weakly_commuting_check(model):
    """``<psi|[L1, L2]|psi> / 2i`` evaluated from explicit SLD matrices."""
    L1 = sld_pure(model, 0)
    L2 = sld_pure(model, 1)
    psi = model.psi0
    comm = psi.conj() @ (L1 @ L2 - L2 @ L1) @ psi
    return float((comm / 2j).real)
