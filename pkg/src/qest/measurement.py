"""Optimal measurements and classical Fisher information of POVMs.

Constructions live in the standard form (``J = I``) and are carried back to
the original model with :func:`rotate_measurement` and :func:`pull_back`.
"""
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_orthogonal, sym_inv_sqrt
from .bound import cmi_for_model, weighted_trace
from .canonical import canonical_q, rotation_unitary, to_standard_form
from .exceptions import WrongBranchError
from .statmodel import _gram, _stable_det_j, fisher_pair, gauge_fix, sld_pure
from .tolerances import POVM_COMPLETENESS_TOL, POVM_PSD_TOL, PROB_FLOOR, DEFICIT_FLOOR

__all__ = [
    "Povm",
    "Cfim",
    "classical_fisher",
    "optimal_projectors",
    "optimal_povm_beta1",
    "rotate_measurement",
    "pull_back",
    "optimal_measurement_for_weight",
    "branciard_measurement",
    "regret_check",
    "inequality_slack",
    "achieved_value",
]


@dataclass(frozen=True, eq=False)
class Povm:
    elements: list
    labels: list = field(default=None)

    def __post_init__(self):
        elements = [np.asarray(e, dtype=complex) for e in self.elements]
        if not elements:
            raise ValueError("a POVM needs at least one element")
        d = elements[0].shape[0]
        for e in elements:
            if e.shape != (d, d):
                raise ValueError(f"POVM elements must all be {d}x{d}, got {e.shape}")
        object.__setattr__(self, "elements", elements)
        labels = self.labels
        if labels is None:
            labels = [str(i) for i in range(len(elements))]
        elif len(labels) != len(elements):
            raise ValueError("one label per POVM element is required")
        object.__setattr__(self, "labels", list(labels))

    @classmethod
    def from_vectors(cls, vectors, labels=None):
        return cls([np.outer(v, np.conj(v)) for v in vectors], labels)

    @property
    def dim(self):
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    def violations(self):
        """Worst negative eigenvalue, Hermiticity defect and completeness defect."""
        min_eig = min(np.linalg.eigvalsh(0.5 * (e + e.conj().T)).min() for e in self.elements)
        herm = max(np.max(np.abs(e - e.conj().T)) for e in self.elements)
        total = np.sum(self.elements, axis=0)
        return float(min_eig), float(herm), float(np.max(np.abs(total - np.eye(self.dim))))

    def is_valid(self, psd_tol=POVM_PSD_TOL, completeness_tol=POVM_COMPLETENESS_TOL):
        min_eig, herm, compl = self.violations()
        return min_eig >= -psd_tol and herm <= psd_tol and compl <= completeness_tol

    def probabilities(self, psi):
        return np.array([np.real(psi.conj() @ e @ psi) for e in self.elements])


@dataclass(frozen=True, eq=False)
class Cfim:
    """Classical Fisher information ``F`` of a measurement and the model's ``J``.

    ``det_F`` and ``det_J``, when present, are determinants computed without
    cancellation; they pin down a near-zero eigenvalue of ``G`` far more
    accurately than diagonalising ``G`` itself.
    """

    F: np.ndarray
    J: np.ndarray
    det_F: float = None
    det_J: float = None

    @property
    def G(self):
        Jm = sym_inv_sqrt(self.J)
        G = Jm @ self.F @ Jm
        return 0.5 * (G + G.T)

    def g_eigenvalues(self):
        """Eigenvalues of ``G``, ascending."""
        g = np.linalg.eigvalsh(self.G)
        if self.det_F is not None and self.det_J is not None and g[1] > 0:
            g[0] = self.det_F / self.det_J / g[1]
        return g

    def scaled(self, factor):
        """Same model, ``F`` multiplied by ``factor``."""
        det_F = None if self.det_F is None else self.det_F * factor**2
        return Cfim(self.F * factor, self.J, det_F, self.det_J)


def classical_fisher(povm, model):
    """Fisher information of the outcome distribution at the true parameter.

    Uses ``d_j p_i = 2 Re <d_j psi|Pi_i|psi>`` on the gauge-fixed model;
    outcomes with probability below ``PROB_FLOOR`` contribute nothing.
    """
    if povm.dim != model.dim:
        raise ValueError(f"POVM acts on dimension {povm.dim}, model has {model.dim}")
    gm = gauge_fix(model)
    psi, dpsi = gm.psi0, gm.dpsi
    rows = []
    for e in povm.elements:
        ep = e @ psi
        p = np.real(psi.conj() @ ep)
        if p < PROB_FLOOR:
            continue
        rows.append(2.0 * np.real(dpsi.conj() @ ep) / np.sqrt(p))
    a = np.array(rows).reshape(-1, 2)
    F = a.T @ a
    # Cauchy-Binet: det(sum a a^T) = sum_{i<k} (a_i x a_k)^2, exact for parallel rows
    cross = np.outer(a[:, 0], a[:, 1]) - np.outer(a[:, 1], a[:, 0])
    det_F = 0.5 * float(np.sum(cross**2))
    J = 4.0 * _gram(gm).real
    return Cfim(0.5 * (F + F.T), 0.5 * (J + J.T), det_F, _stable_det_j(gm))


def _require_phi(phi, eta):
    if abs(phi) > eta + 1e-12:
        raise ValueError(f"phi = {phi!r} outside [-{eta!r}, {eta!r}]")


def optimal_projectors(std, phi):
    """Three-outcome projective measurement giving ``F = diag(cos^2(phi-eta), cos^2(phi+eta))``."""
    if std.dprime != 3:
        raise WrongBranchError("projective construction needs the 3-d (beta < 1) standard form")
    _require_phi(phi, std.eta)
    r3 = np.sqrt(3.0)
    ep, em = np.exp(1j * phi), np.exp(-1j * phi)
    x = (3 * em - r3 * ep) / 6
    y = -(3 * em + r3 * ep) / 6
    vecs = [
        np.array([1.0, ep, ep]) / r3,
        np.array([1 / r3, x, y]),
        np.array([1 / r3, y, x]),
    ]
    return Povm.from_vectors(vecs, ["pi1", "pi2", "pi3"])


def optimal_povm_beta1(std, phi):
    """Four-outcome POVM mixing the two SLD measurements with weight ``cos^2(phi - pi/4)``."""
    if std.dprime != 2:
        raise WrongBranchError("four-outcome construction needs the 2-d (beta = 1) standard form")
    _require_phi(phi, np.pi / 4)
    alpha = np.cos(phi - np.pi / 4) ** 2
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"mixing weight {alpha!r} outside [0, 1]")
    eye = np.eye(2)
    L1, L2 = std.sld(0), std.sld(1)
    elements = [
        alpha / 2 * (eye + L1),
        alpha / 2 * (eye - L1),
        (1 - alpha) / 2 * (eye + L2),
        (1 - alpha) / 2 * (eye - L2),
    ]
    return Povm(elements, ["L1+", "L1-", "L2+", "L2-"])


def rotate_measurement(povm, std, Q):
    """Conjugate by ``U_Q`` so the Fisher information becomes ``Q F Q^T``.

    An improper ``Q`` is replaced by ``Q diag(1, -1)``, which yields the same
    ``Q F Q^T`` whenever ``F`` is diagonal (as for the canonical measurements).
    """
    Q = check_orthogonal(Q)
    if np.linalg.det(Q) < 0:
        Q = Q @ np.diag([1.0, -1.0])
    U = rotation_unitary(std, Q)
    return Povm([U.conj().T @ e @ U for e in povm.elements], povm.labels)


def pull_back(povm, record):
    """Embed a standard-form POVM into the original Hilbert space.

    The orthogonal complement of the model subspace becomes one extra
    outcome, which has zero probability on the probe.
    """
    E = record.embedding
    elements = [E @ e @ E.conj().T for e in povm.elements]
    labels = list(povm.labels)
    d, dprime = E.shape
    if d > dprime:
        comp = np.eye(d) - E @ E.conj().T
        elements.append(0.5 * (comp + comp.conj().T))
        labels.append("complement")
    return Povm(elements, labels)


def inequality_slack(G, beta):
    """``sqrt(det G) - sqrt(det(I - G)) - sqrt(1 - beta^2)``; zero on the optimal arc.

    ``G`` is a matrix or a :class:`Cfim` (preferred: its small eigenvalue is
    computed from exact determinants).  Within ``DEFICIT_FLOOR`` of 0 or 1 an
    eigenvalue is rounding noise on an exact boundary value (projective or
    saturating measurements) and is snapped to it; otherwise the square roots
    would turn ``1e-16`` into ``1e-8``.
    """
    if isinstance(G, Cfim):
        g = G.g_eigenvalues()
    else:
        G = np.asarray(G, dtype=float)
        g = np.linalg.eigvalsh(0.5 * (G + G.T))
    g[g < DEFICIT_FLOOR] = 0.0
    c = 1.0 - g
    c[c < DEFICIT_FLOOR] = 0.0
    return float(np.sqrt(g[0] * g[1]) - np.sqrt(c[0] * c[1]) - np.sqrt(max(1.0 - beta**2, 0.0)))


def achieved_value(povm, model):
    """``tr[W F^{-1}]`` of a measurement on ``model``."""
    return weighted_trace(model.weight, classical_fisher(povm, model).F)


def optimal_measurement_for_weight(model, phi=None):
    """Measurement attaining the most informative bound for ``model.weight``.

    Parameters
    ----------
    model : PureModel
    phi : float, optional
        Override for the boundary angle; defaults to the optimiser of the bound.

    Returns
    -------
    povm : Povm
        Measurement on the original ``d``-dimensional space.
    bound : BoundResult
    """
    std, record = to_standard_form(model)
    bound = cmi_for_model(model)
    if phi is None:
        phi = bound.phi_star
    Q = canonical_q(record.weight_to_standard(model.weight))
    if std.dprime == 3:
        base = optimal_projectors(std, phi)
    else:
        base = optimal_povm_beta1(std, phi)
    return pull_back(rotate_measurement(base, std, Q), record), bound


def branciard_measurement(model, phi, q, r, s=None, t=None):
    """Branciard's projective measurement for a model already in a ``J = I`` parametrisation.

    ``s`` and ``t`` are free up to ``s t = <m1|m1> / (1 - beta^2)``; when
    only one is given the other is solved for, and by default both equal the
    square root of that product.  The resulting Fisher information is
    ``diag(cos^2(phi + eta), cos^2(phi - eta))`` whatever ``q, r, s, t``.
    """
    gm = gauge_fix(model)
    pair = fisher_pair(gm)
    if np.max(np.abs(pair.J - np.eye(2))) > 1e-9:
        raise ValueError("branciard_measurement needs J = I; reparametrise with to_standard_form")
    beta = abs(pair.Jtilde[0, 1])
    if pair.beta >= 1.0:
        raise WrongBranchError("Branciard's construction is used for beta < 1 only")
    eta = 0.5 * np.arcsin(beta)
    _require_phi(phi, eta)

    psi = gm.psi0
    L1 = sld_pure(gm, 0)
    # the construction assumes <L1 L2> = +i beta
    L2 = sld_pure(gm, 1) * (1.0 if pair.Jtilde[0, 1] >= 0 else -1.0)
    a = q * np.cos(phi + eta) + 1j * r * np.sin(phi + eta)
    b = r * np.cos(phi - eta) + 1j * q * np.sin(phi - eta)
    m1 = psi + b * (L1 @ psi) + a * (L2 @ psi)
    n1 = float(np.real(m1.conj() @ m1))
    if abs(n1 - 1.0) < 1e-12:
        raise ValueError("q = r = 0 makes the construction degenerate")
    D = (m1.conj() @ L2 @ psi) * L1 - (m1.conj() @ L1 @ psi) * L2
    st = n1 / (1.0 - beta**2)
    if s is None and t is None:
        s = t = np.sqrt(st)
    elif t is None:
        t = st / s
    elif s is None:
        s = st / t
    elif abs(s * t - st) > 1e-9 * st:
        raise ValueError(f"s * t must equal {st!r}, got {s * t!r}")
    Dpsi = D @ psi
    m2 = n1 * psi + s * Dpsi - m1
    m3 = n1 * psi - t * Dpsi - m1
    vecs = [m / np.linalg.norm(m) for m in (m1, m2, m3)]
    elements = [np.outer(v, v.conj()) for v in vecs]
    labels = ["m1", "m2", "m3"]
    if gm.dim > 3:
        comp = np.eye(gm.dim) - np.sum(elements, axis=0)
        elements.append(0.5 * (comp + comp.conj().T))
        labels.append("complement")
    return Povm(elements, labels)


def regret_check(F, pair):
    """Slack in the information-regret inequality; non-negative for any measurement.

    ``x1 + x2 + 2 sqrt(1 - chi^2) sqrt(x1 x2) - chi^2`` with
    ``x_j = (J_jj - F_jj) / J_jj``.  Values of ``x_j`` below ``DEFICIT_FLOOR``
    are rounding noise and are set to zero: ``sqrt(x1 x2)`` would otherwise
    turn ``1e-17`` into ``1e-8``.  Zeroing can only lower the slack, so it
    never hides a violation.
    """
    F = F.F if isinstance(F, Cfim) else np.asarray(F, dtype=float)
    J = pair.J
    x1, x2 = ((J[j, j] - F[j, j]) / J[j, j] for j in range(2))
    x1 = x1 if x1 > DEFICIT_FLOOR else 0.0
    x2 = x2 if x2 > DEFICIT_FLOOR else 0.0
    chi = pair.Jtilde[0, 1] / np.sqrt(J[0, 0] * J[1, 1])
    return float(x1 + x2 + 2 * np.sqrt(max(1 - chi**2, 0.0)) * np.sqrt(x1 * x2) - chi**2)
