"""Brute-force cross-checks used by the test-suite and ``qest verify``.

Random draws use NumPy's Philox counter-based generator keyed by
``(seed, sample index)``, so a fuzz run is reproducible and independent of how
samples are split across worker processes.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .bound import cmi, objective
from .exceptions import SingularModel
from .measurement import (
    Povm, classical_fisher, inequality_slack, optimal_measurement_for_weight, regret_check,
)
from .mixed import MixedModel
from .statmodel import PureModel, fisher_pair, gauge_fix
from .tolerances import DEFAULT_SEED, INEQUALITY_TOL, QUARTIC_VS_GRID_REL, REGRET_TOL

__all__ = [
    "OracleReport",
    "rng_for",
    "golden_section",
    "grid_min_cmi",
    "random_povm",
    "random_pure_model",
    "random_mixed_model",
    "random_weight",
    "finite_difference_fisher",
    "inequality_fuzz",
    "run_fuzz",
    "quartic_agreement",
    "quadrature",
    "QUADRATURE_INTEGRANDS",
    "grid_fisher_by_quadrature",
]

INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class OracleReport:
    name: str
    max_violation: float
    samples: int
    passed: bool

    def tsv(self):
        return f"{self.name}\t{self.max_violation:.17g}\t{self.samples}\t{'PASS' if self.passed else 'FAIL'}"


def _report(name, max_violation, samples, tol):
    return OracleReport(name, float(max_violation), int(samples), bool(max_violation <= tol))


def rng_for(seed, index=0):
    return np.random.Generator(np.random.Philox([int(seed), int(index)]))


def golden_section(f, a, b, tol=1e-14):
    """Shrink ``[a, b]`` around the minimum of a unimodal ``f``; return the midpoint."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        if c >= d:  # interval below float resolution
            break
    return 0.5 * (a + b)


def _slope(phi, s1, s2, eta):
    """Derivative of the bound objective in ``phi``."""
    out = 0.0
    for s, ang in ((s1, phi - eta), (s2, phi + eta)):
        if s:
            out += 2.0 * s * np.tan(ang) / np.cos(ang) ** 2
    return out


def _bisect_slope(lo, hi, s1, s2, eta):
    """Zero of the (increasing) slope in ``[lo, hi]``, or the endpoint it points to."""
    if _slope(lo, s1, s2, eta) >= 0:
        return lo
    if _slope(hi, s1, s2, eta) <= 0:
        return hi
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return mid
        if _slope(mid, s1, s2, eta) > 0:
            hi = mid
        else:
            lo = mid


def grid_min_cmi(s1, s2, beta, npoints=10_000):
    """Direct minimisation of the bound objective: uniform grid, then golden section.

    The objective is convex in ``phi`` on ``[-eta, eta]`` so refining the
    bracket around the best grid point finds the global minimum.  Golden
    section pins the value; the minimiser itself is then polished by
    bisecting the sign of the analytic slope, since value comparisons stop
    resolving ``phi`` below about ``sqrt(eps)``.
    """
    if npoints < 1000:
        raise ValueError("grid_min_cmi needs at least 1000 points")
    eta = 0.5 * math.asin(min(max(beta, 0.0), 1.0))
    if eta == 0.0:
        return float(objective(0.0, s1, s2, 0.0)), 0.0
    grid = np.linspace(-eta, eta, npoints)
    vals = objective(grid, s1, s2, eta)
    k = int(np.argmin(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, npoints - 1)]
    f = lambda phi: float(objective(phi, s1, s2, eta))
    cands = [golden_section(f, lo, hi), float(grid[k])]
    if np.isfinite(vals[k]):
        cands.append(_bisect_slope(lo, hi, s1, s2, eta))
    return min((f(phi), phi) for phi in cands)


def random_povm(d, n_outcomes, seed, rank=None):
    """Random POVM ``S^{-1/2} A_i A_i^dag S^{-1/2}`` from complex Gaussian ``A_i``."""
    if n_outcomes < 1:
        raise ValueError("n_outcomes must be positive")
    if n_outcomes == 1:
        return Povm([np.eye(d, dtype=complex)])
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed)
    rank = d if rank is None else rank
    if n_outcomes * rank < d:
        raise ValueError(f"{n_outcomes} elements of rank {rank} cannot resolve the identity on C^{d}")
    while True:
        mats = [
            (rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))) for _ in range(n_outcomes)
        ]
        pos = [a @ a.conj().T for a in mats]
        total = np.sum(pos, axis=0)
        vals, vecs = np.linalg.eigh(total)
        if vals.min() > 1e-8 * vals.max():
            break
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
    elements = []
    for p in pos:
        e = inv_sqrt @ p @ inv_sqrt
        elements.append(0.5 * (e + e.conj().T))
    return Povm(elements)


def random_weight(rng, rank=2):
    a = rng.normal(size=(2, rank))
    return a @ a.T


def random_pure_model(d, rng, weight=None):
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    dpsi = rng.normal(size=(2, d)) + 1j * rng.normal(size=(2, d))
    return PureModel(psi, dpsi, random_weight(rng) if weight is None else weight)


def random_mixed_model(d, rank, rng, weight=None):
    """Random rank-``rank`` state with derivatives generated by random Hermitian SLDs."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    V, _ = np.linalg.qr(z)
    p = rng.uniform(0.1, 1.0, size=rank)
    p /= p.sum()
    rho = (V[:, :rank] * p) @ V[:, :rank].conj().T
    drho = []
    for _ in range(2):
        h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        L = h + h.conj().T
        L -= np.trace(rho @ L).real * np.eye(d)
        drho.append(0.5 * (rho @ L + L @ rho))
    return MixedModel(rho, np.array(drho), random_weight(rng) if weight is None else weight)


def finite_difference_fisher(povm, model, h=1e-5):
    """Fisher information from central differences of outcome probabilities.

    The state along the parameters is the normalised first-order expansion
    ``psi0 + theta_1 d_1 psi + theta_2 d_2 psi`` of the gauge-fixed model.
    """
    gm = gauge_fix(model)

    def probs(theta):
        psi = gm.psi0 + theta[0] * gm.dpsi[0] + theta[1] * gm.dpsi[1]
        psi = psi / np.linalg.norm(psi)
        return povm.probabilities(psi)

    p0 = probs(np.zeros(2))
    grads = []
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        grads.append((probs(e) - probs(-e)) / (2 * h))
    grads = np.array(grads)
    keep = p0 > 1e-12
    return (grads[:, keep] / p0[keep]) @ grads[:, keep].T


def inequality_fuzz(models, povms, perturb=1.0):
    """Worst violations of the Fisher-information inequality and the regret inequality.

    Returns two :class:`OracleReport` objects, ``fisher_inequality`` and
    ``regret_inequality``.  ``perturb`` scales every ``F`` and exists as a
    negative control.
    """
    worst_ineq = worst_regret = -np.inf
    n = 0
    for model, povm in zip(models, povms):
        pair = fisher_pair(model)
        cf = classical_fisher(povm, model).scaled(perturb)
        worst_ineq = max(worst_ineq, inequality_slack(cf, pair.beta))
        worst_regret = max(worst_regret, -regret_check(cf, pair))
        n += 1
    if n == 0:
        worst_ineq = worst_regret = 0.0
    return [
        _report("fisher_inequality", worst_ineq, n, INEQUALITY_TOL),
        _report("regret_inequality", worst_regret, n, REGRET_TOL),
    ]


def _fuzz_sample(seed, index, dims):
    rng = rng_for(seed, index)
    d = dims[index % len(dims)]
    while True:
        model = random_pure_model(d, rng)
        try:
            fisher_pair(model)
            break
        except SingularModel:
            continue
    if index % 10 == 0:
        povm, _ = optimal_measurement_for_weight(model)
    else:
        n_out = int(rng.integers(2, 2 * d + 3))
        rank = int(rng.integers(-(-d // n_out), d + 1))
        povm = random_povm(d, n_out, rng, rank=rank)
    return model, povm


def _fuzz_chunk(args):
    seed, indices, dims, perturb = args
    samples = [_fuzz_sample(seed, i, dims) for i in indices]
    return inequality_fuzz([s[0] for s in samples], [s[1] for s in samples], perturb)


def run_fuzz(n_samples, dims=(2, 3, 4, 5), seed=DEFAULT_SEED, jobs=1, perturb=1.0):
    """Fuzz both inequalities over ``n_samples`` seeded (model, POVM) pairs.

    Every tenth sample uses the optimal measurement so saturation is exercised.
    """
    dims = tuple(dims)
    jobs = max(1, int(jobs or 1))
    chunks = [list(range(k, n_samples, jobs)) for k in range(jobs)]
    tasks = [(seed, c, dims, perturb) for c in chunks if c]
    if not tasks:
        return inequality_fuzz([], [])
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_fuzz_chunk, tasks))
    else:
        parts = [_fuzz_chunk(t) for t in tasks]
    merged = []
    for k, name in enumerate(("fisher_inequality", "regret_inequality")):
        worst = max(p[k].max_violation for p in parts)
        tol = INEQUALITY_TOL if k == 0 else REGRET_TOL
        merged.append(_report(name, worst, n_samples, tol))
    return merged


def quartic_agreement(n_samples, seed=DEFAULT_SEED, npoints=2000):
    """Largest ``|cmi - grid_min_cmi| / (1 + value)`` over random ``(s1, s2, beta)``."""
    rng = rng_for(seed, 2**31)
    worst = 0.0
    for _ in range(n_samples):
        s1, s2 = 10.0 * (1.0 - rng.random(2))
        beta = rng.random()
        value = cmi(s1, s2, beta).value
        ref, _ = grid_min_cmi(s1, s2, beta, npoints)
        worst = max(worst, abs(value - ref) / (1.0 + value))
    return _report("quartic_vs_grid", worst, n_samples, QUARTIC_VS_GRID_REL)


def _peak(q, t, delta):
    return (2 / np.pi) ** 0.25 * np.exp(-np.pi * delta**2 * t**2) * np.exp(
        -((q - np.sqrt(2 * np.pi) * t) ** 2) / (2 * delta**2)
    )


def _integrand_psi(q, t1, t2, delta):
    return _peak(q, t1, delta) * _peak(q, t2, delta)


def _integrand_dd_u(q, t1, t2, delta):
    a1, a2 = np.sqrt(2 * np.pi) * t1, np.sqrt(2 * np.pi) * t2
    return (q - a1) * (q - a2) / delta**4 * _peak(q, t1, delta) * _peak(q, t2, delta)


def _integrand_dd_v(q, t1, t2, delta):
    return q**2 * _peak(q, t1, delta) * _peak(q, t2, delta)


QUADRATURE_INTEGRANDS = {
    "psi": _integrand_psi,
    "dd_u": _integrand_dd_u,
    "dd_v": _integrand_dd_v,
}


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abserr: float
    converged: bool


def quadrature(integrand_id, t1, t2, delta, abs_tol=1e-12):
    """Adaptive Gauss-Kronrod integral of a registered grid-state overlap integrand over ``q``."""
    try:
        f = QUADRATURE_INTEGRANDS[integrand_id]
    except KeyError:
        raise ValueError(f"unknown integrand {integrand_id!r}") from None
    centre = np.sqrt(2 * np.pi) * (t1 + t2) / 2
    half = 40.0 * delta + np.sqrt(2 * np.pi) * abs(t1 - t2)
    value, err = integrate.quad(
        f, centre - half, centre + half, args=(t1, t2, delta),
        epsabs=1e-15, epsrel=1e-13, limit=400, points=[centre],
    )
    return QuadratureResult(value, err, err < abs_tol)


def _grid_wave(q, delta, T):
    """Unnormalised grid wavefunction and its ``q``-derivative."""
    t = np.arange(-T, T + 1, dtype=float)[:, None]
    peaks = _peak(q, t, delta)
    slope = -(q - np.sqrt(2 * np.pi) * t) / delta**2 * peaks
    return peaks.sum(axis=0), slope.sum(axis=0)


def grid_fisher_by_quadrature(delta, T):
    """``J`` and ``Jtilde_12`` of the grid state from integrals over ``q``.

    Displacing ``q`` gives ``d_u psi = -psi'`` and kicking ``p`` gives
    ``d_v psi = i q psi``, so ``J = 4 diag(<psi'|psi'>, <q^2>)`` and
    ``Jtilde_12 = 4 Im <d_u psi|d_v psi> = -4 int psi' q psi``.
    """
    half = np.sqrt(2 * np.pi) * T + 40 * delta
    pts = list(np.sqrt(2 * np.pi) * np.arange(-T, T + 1))

    def integral(kind):
        def f(q):
            w, dw = _grid_wave(np.atleast_1d(q), delta, T)
            return float({"n": w * w, "u": dw * dw, "v": q * q * w * w, "x": dw * q * w}[kind][0])

        val, _ = integrate.quad(f, -half, half, epsabs=1e-14, epsrel=1e-13, limit=2000, points=pts)
        return val

    norm = integral("n")
    J = np.diag([4 * integral("u") / norm, 4 * integral("v") / norm])
    return J, -4 * integral("x") / norm
