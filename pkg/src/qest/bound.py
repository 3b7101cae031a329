"""Most informative Cramer-Rao bound for two parameters and pure probes.

The bound is a one-dimensional minimisation over the angle ``phi`` that
parameterises the boundary of the attainable Fisher-information region.  The
stationarity condition is a quartic in ``tan(phi)``, which is solved through
its companion matrix; closed forms are used for the degenerate cases.
"""
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_weight, sym_inv_sqrt
from .canonical import canonical_q
from .statmodel import fisher_pair
from .tolerances import BETA_ZERO, EQUAL_S_REL, IMAG_ROOT_REL

__all__ = [
    "BoundResult",
    "objective",
    "quartic_coefficients",
    "polynomial_roots",
    "cmi",
    "cmi_from_fisher",
    "cmi_for_model",
    "weighted_trace",
]

BRANCHES = ("general", "beta_zero", "beta_one", "equal_s", "singular_w")


@dataclass(frozen=True)
class BoundResult:
    """Value of the bound together with the optimal boundary point.

    ``s`` holds the eigenvalues of ``J^{-1/2} W J^{-1/2}`` in the order they
    were paired with ``cos^2(phi - eta)`` and ``cos^2(phi + eta)``.
    """

    value: float
    phi_star: float
    s: tuple
    eta: float
    beta: float
    branch: str
    c_sld: float = None
    Q: np.ndarray = field(default=None, compare=False)
    attainable: bool = True

    @property
    def mu_nu(self):
        """Eigenvalues of the normalised Fisher information at the optimum."""
        return (np.cos(self.phi_star - self.eta) ** 2, np.cos(self.phi_star + self.eta) ** 2)


def objective(phi, s1, s2, eta):
    """``s1 / cos^2(phi - eta) + s2 / cos^2(phi + eta)``.

    A zero weight contributes nothing even where its cosine vanishes; a
    vanishing cosine with a positive weight gives ``inf``.
    """
    phi = np.asarray(phi, dtype=float)
    total = np.zeros(phi.shape)
    for s, ang in ((s1, phi - eta), (s2, phi + eta)):
        if s == 0:
            continue
        c2 = np.cos(ang) ** 2
        with np.errstate(divide="ignore"):
            total = total + np.where(c2 > 0, s / np.where(c2 > 0, c2, 1.0), np.inf)
    return total if total.ndim else float(total)


def quartic_coefficients(s1, s2, eta):
    """Coefficients (highest degree first) of the stationarity quartic in ``x = tan(phi)``."""
    if eta <= 0:
        raise ValueError("quartic is degenerate at eta = 0; use the beta = 0 closed form")
    c, s = np.cos(eta), np.sin(eta)
    return np.array([
        2 * (s2 - s1) * c * s**3,
        2 * (s1 + s2) * (3 * c**2 * s**2 + s**4),
        -6 * (s1 - s2) * (c**3 * s + c * s**3),
        2 * (s1 + s2) * (c**4 + 3 * c**2 * s**2),
        -2 * (s1 - s2) * c**3 * s,
    ])


def polynomial_roots(coeffs, polish=3):
    """Roots from the companion-matrix eigenvalues, Newton-polished on the full polynomial."""
    coeffs = np.asarray(coeffs, dtype=float)
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        raise ValueError("zero polynomial")
    # leading terms negligible at the working scale only push roots to infinity
    lead = np.flatnonzero(np.abs(coeffs) > 1e-14 * scale)[0]
    trimmed = coeffs[lead:] / coeffs[lead]
    n = trimmed.size - 1
    if n == 0:
        return np.array([], dtype=complex)
    comp = np.zeros((n, n))
    comp[0, :] = -trimmed[1:]
    comp[1:, :-1] = np.eye(n - 1)
    roots = np.linalg.eigvals(comp).astype(complex)

    deriv = np.polyder(coeffs)
    for k, r in enumerate(roots):
        for _ in range(polish):
            p = np.polyval(coeffs, r)
            dp = np.polyval(deriv, r)
            if dp == 0:
                break
            with np.errstate(over="ignore", invalid="ignore"):
                cand = r - p / dp
            if np.isfinite(cand) and abs(np.polyval(coeffs, cand)) < abs(p):
                r = cand
            else:
                break
        roots[k] = r
    return roots


def _check_inputs(s1, s2, beta):
    s1, s2, beta = float(s1), float(s2), float(beta)
    if not (np.isfinite(s1) and np.isfinite(s2)) or s1 < 0 or s2 < 0:
        raise ValueError(f"s1, s2 must be finite and non-negative, got {s1!r}, {s2!r}")
    if not np.isfinite(beta) or beta < -1e-12 or beta > 1 + 1e-12:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    return s1, s2, min(max(beta, 0.0), 1.0)


def cmi(s1, s2, beta):
    """Minimise ``s1/cos^2(phi-eta) + s2/cos^2(phi+eta)`` over ``|phi| <= eta``.

    Parameters
    ----------
    s1, s2 : float
        Non-negative eigenvalues of ``J^{-1/2} W J^{-1/2}``.  Any order is
        allowed; swapping them mirrors ``phi_star``.
    beta : float
        Incompatibility coefficient in ``[0, 1]``.

    Returns
    -------
    BoundResult
    """
    s1, s2, beta = _check_inputs(s1, s2, beta)
    eta = 0.5 * np.arcsin(beta)
    total = s1 + s2

    def result(value, phi, branch):
        return BoundResult(float(value), float(phi), (s1, s2), float(eta), beta, branch, total)

    if beta < BETA_ZERO:
        return result(total, 0.0, "beta_zero")
    smax, smin = max(s1, s2), min(s1, s2)
    if smin < EQUAL_S_REL * smax or smax == 0:
        # at beta = 1 a tiny s_min is eigenvalue noise and the boundary objective
        # is singular, so the exact rank-1 value is returned
        phi = eta if s1 >= s2 else -eta
        value = smax if beta == 1.0 else objective(phi, s1, s2, eta)
        return result(value, phi, "singular_w")
    if abs(s1 - s2) < EQUAL_S_REL * total:
        return result(2.0 * total / (1.0 + np.sqrt(1.0 - beta**2)), 0.0, "equal_s")
    if beta == 1.0:
        r1, r2 = np.sqrt(s1), np.sqrt(s2)
        mu = r1 / (r1 + r2)
        phi = np.pi / 4 - np.arccos(np.sqrt(mu))
        return result((r1 + r2) ** 2, phi, "beta_one")

    xmax = np.tan(eta)
    roots = polynomial_roots(quartic_coefficients(s1, s2, eta))
    real = roots[np.abs(roots.imag) < IMAG_ROOT_REL * (1 + np.abs(roots))].real
    cands = np.concatenate([np.arctan(np.clip(real, -xmax, xmax)), [-eta, eta]])
    vals = objective(cands, s1, s2, eta)
    k = int(np.argmin(vals))
    return result(vals[k], cands[k], "general")


def weighted_trace(weight, F):
    """``tr[W F^{-1}]``, using the pseudo-inverse when ``F`` is singular."""
    F = np.asarray(F, dtype=float)
    if np.linalg.cond(F) > 1e14:
        return float(np.trace(weight @ np.linalg.pinv(F, rcond=1e-12)))
    return float(np.trace(np.linalg.solve(F, weight)))


def cmi_from_fisher(J, beta, weight=None):
    """Bound from a quantum Fisher matrix, incompatibility and weight."""
    W = check_weight(weight)
    Jm = sym_inv_sqrt(J)
    S = Jm @ W @ Jm
    S = 0.5 * (S + S.T)
    s = np.clip(np.linalg.eigvalsh(S)[::-1], 0.0, None)
    res = cmi(s[0], s[1], beta)
    c_sld = float(np.trace(W @ np.linalg.inv(J)))
    # compatible case: report the same number through both fields
    value = c_sld if res.branch == "beta_zero" else res.value
    return BoundResult(
        value, res.phi_star, res.s, res.eta, res.beta, res.branch, c_sld, canonical_q(S),
    )


def cmi_for_model(model):
    pair = fisher_pair(model)
    return cmi_from_fisher(pair.J, pair.beta, model.weight)
