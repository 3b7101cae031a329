"""Lower bound for mixed-state models through a Fisher-information-preserving purification."""
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_hermitian, check_weight
from .bound import BoundResult, cmi_from_fisher
from .exceptions import ModelError, ModelNotRegular
from .statmodel import PureModel, beta_from
from .tolerances import LEAK_TOL, NORM_TOL, SUPPORT_MIN

__all__ = ["MixedModel", "sld_mixed", "mixed_fisher", "cstar", "purify", "partial_trace_env"]


@dataclass(frozen=True, eq=False)
class MixedModel:
    """Density matrix, its two derivatives and a weight matrix."""

    rho: np.ndarray
    drho: np.ndarray
    weight: np.ndarray = field(default=None)

    def __post_init__(self):
        rho = check_hermitian(self.rho, "rho")
        if abs(np.trace(rho).real - 1.0) > NORM_TOL:
            raise ModelError(f"rho must have unit trace, got {np.trace(rho).real!r}")
        if np.linalg.eigvalsh(rho).min() < -NORM_TOL:
            raise ModelError("rho must be positive semidefinite")
        drho = np.asarray(self.drho, dtype=complex)
        if drho.shape != (2,) + rho.shape:
            raise ModelError(f"drho must have shape {(2,) + rho.shape}, got {drho.shape}")
        for j in range(2):
            check_hermitian(drho[j], f"drho[{j}]")
            if abs(np.trace(drho[j])) > LEAK_TOL:
                raise ModelError(f"drho[{j}] must be traceless")
        object.__setattr__(self, "rho", 0.5 * (rho + rho.conj().T))
        object.__setattr__(self, "drho", 0.5 * (drho + drho.conj().transpose(0, 2, 1)))
        object.__setattr__(self, "weight", check_weight(self.weight))

    @property
    def dim(self):
        return self.rho.shape[0]


def sld_mixed(model, j):
    """Solve ``drho_j = (rho L + L rho) / 2`` in the eigenbasis of ``rho``.

    The block where both eigenvalues vanish is gauge and set to zero.

    Raises
    ------
    ModelNotRegular
        If ``drho_j`` has weight on that block, so no SLD exists.
    """
    p, V = np.linalg.eigh(model.rho)
    p = np.clip(p, 0.0, None)
    D = V.conj().T @ model.drho[j] @ V
    denom = p[:, None] + p[None, :]
    support = denom >= SUPPORT_MIN
    if np.any(np.abs(D[~support]) > LEAK_TOL):
        raise ModelNotRegular(f"derivative {j} leaks outside the support of rho")
    L = np.zeros_like(D)
    L[support] = 2.0 * D[support] / denom[support]
    L = V @ L @ V.conj().T
    return 0.5 * (L + L.conj().T)


def mixed_fisher(model):
    """``J = Re Tr[rho L_i L_j]`` and ``Jtilde = Im Tr[rho L_i L_j]``."""
    L = [sld_mixed(model, j) for j in range(2)]
    m = np.array([[np.trace(model.rho @ L[i] @ L[k]) for k in range(2)] for i in range(2)])
    J = 0.5 * (m.real + m.real.T)
    Jt = 0.5 * (m.imag - m.imag.T)
    return J, Jt


def cstar(model):
    """Pure-state bound formula evaluated with the mixed-state ``J`` and ``beta``.

    A valid lower bound on ``tr[W V]`` that is not attainable in general.
    """
    J, Jt = mixed_fisher(model)
    res = cmi_from_fisher(J, beta_from(J, Jt), model.weight)
    return BoundResult(
        res.value, res.phi_star, res.s, res.eta, res.beta, res.branch, res.c_sld, res.Q,
        attainable=False,
    )


def purify(model):
    """Minimal purification ``sum_i sqrt(p_i)|psi_i>|e_i>`` with derivatives ``(L_j x I)|Psi>/2``.

    The environment dimension is the rank of ``rho``; the system index is the
    slow one, so the joint state has shape ``(d * r,)``.
    """
    p, V = np.linalg.eigh(model.rho)
    keep = p > SUPPORT_MIN
    p, V = p[keep], V[:, keep]
    r = p.size
    Psi = np.zeros((model.dim, r), dtype=complex)
    for i in range(r):
        Psi[:, i] = np.sqrt(p[i]) * V[:, i]
    psi0 = Psi.reshape(-1)
    psi0 = psi0 / np.linalg.norm(psi0)
    dpsi = np.array([0.5 * (sld_mixed(model, j) @ Psi).reshape(-1) for j in range(2)])
    return PureModel(psi0, dpsi, model.weight)


def partial_trace_env(op, dim):
    """Trace out the environment of a ``(d r) x (d r)`` operator."""
    r = op.shape[0] // dim
    return np.einsum("iaja->ij", op.reshape(dim, r, dim, r))
