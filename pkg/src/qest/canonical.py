"""Standard-form reduction of pure two-parameter models.

Every pure model with a given incompatibility ``beta`` is unitarily equivalent,
after a linear reparametrisation making ``J = I``, to a fixed 3-dimensional
form (``beta < 1``) or 2-dimensional form (``beta = 1``).  The
:class:`ReparamRecord` keeps what is needed to carry measurements back.
"""
from dataclasses import dataclass

import numpy as np

from ._validation import check_orthogonal, sym_inv_sqrt
from .statmodel import PureModel, fisher_pair, gauge_fix

__all__ = [
    "StandardForm",
    "ReparamRecord",
    "standard_form",
    "to_standard_form",
    "rotation_unitary",
    "canonical_q",
    "polar_unitary",
]


@dataclass(frozen=True, eq=False)
class StandardForm:
    eta: float
    dprime: int
    psi0: np.ndarray
    dpsi: np.ndarray

    @property
    def beta(self):
        return 1.0 if self.dprime == 2 else float(np.sin(2 * self.eta))

    def as_model(self, weight=None):
        return PureModel(self.psi0, self.dpsi, weight)

    def sld(self, j):
        psi, d = self.psi0, self.dpsi[j]
        return 2.0 * (np.outer(d, psi.conj()) + np.outer(psi, d.conj()))


def standard_form(eta=None, dprime=3):
    """Build the canonical states for angle ``eta`` (3-d) or the 2-d ``beta = 1`` form."""
    if dprime == 2:
        psi0 = np.array([1.0, 0.0], dtype=complex)
        dpsi = 0.5 * np.array([[0.0, 1.0], [0.0, 1j]], dtype=complex)
        return StandardForm(np.pi / 4, 2, psi0, dpsi)
    if dprime != 3:
        raise ValueError(f"dprime must be 2 or 3, got {dprime}")
    if eta is None or not 0.0 <= eta <= np.pi / 4:
        raise ValueError(f"eta must lie in [0, pi/4], got {eta!r}")
    c, s = np.cos(eta), np.sin(eta)
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    dpsi = 0.5 * np.array([[0.0, 1j * s, c], [0.0, c, -1j * s]], dtype=complex)
    return StandardForm(float(eta), 3, psi0, dpsi)


@dataclass(frozen=True, eq=False)
class ReparamRecord:
    """Map between an original model and its standard form.

    Attributes
    ----------
    jacobian : ndarray, shape (2, 2)
        ``A`` with ``theta = A theta'``; derivatives transform as ``d' = A^T d``.
    hilbert_unitary : ndarray, shape (d', d')
        Takes coordinates in ``subspace_basis`` to standard-form coordinates.
    subspace_basis : ndarray, shape (d, d')
        Orthonormal columns spanning ``Span{psi0, d_1 psi, d_2 psi}``.
    """

    jacobian: np.ndarray
    hilbert_unitary: np.ndarray
    subspace_basis: np.ndarray

    @property
    def embedding(self):
        """Isometry from standard-form space into the original space."""
        return self.subspace_basis @ self.hilbert_unitary.conj().T

    def weight_to_standard(self, weight):
        A = self.jacobian
        return A.T @ weight @ A

    def fisher_to_original(self, F_std):
        Ainv = np.linalg.inv(self.jacobian)
        return Ainv.T @ F_std @ Ainv

    def derivatives_to_original(self, dpsi_std):
        """Embed standard-form derivatives and undo the reparametrisation."""
        emb = self.embedding @ np.asarray(dpsi_std).T  # (d, 2), columns d'_k
        return np.linalg.solve(self.jacobian.T, emb.T)


def polar_unitary(m):
    """Nearest unitary (in Frobenius norm) to ``m``."""
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def _phase_normalise(v, tol=1e-12):
    idx = np.flatnonzero(np.abs(v) > tol * np.max(np.abs(v)))[0]
    return v * (abs(v[idx]) / v[idx])


def _subspace_basis(psi0, dpsi, dprime):
    basis = [psi0]
    for d in dpsi[: dprime - 1]:
        w = d - sum(b * (b.conj() @ d) for b in basis)
        w = w / np.linalg.norm(w)
        basis.append(_phase_normalise(w))
    return np.array(basis).T


def to_standard_form(model):
    """Reduce ``model`` to its standard form.

    Returns
    -------
    std : StandardForm
    record : ReparamRecord
    """
    gm = gauge_fix(model)
    pair = fisher_pair(gm)
    dprime = 2 if pair.beta == 1.0 else 3
    # 3-d form carries Jtilde_12 = -beta, 2-d form +1; a reflection fixes the sign
    target = 1.0 if dprime == 2 else -1.0
    reflect = pair.Jtilde[0, 1] * target < 0
    R = np.diag([1.0, -1.0]) if reflect else np.eye(2)
    A = sym_inv_sqrt(pair.J) @ R
    dpsi_new = A.T @ gm.dpsi

    std = standard_form(pair.eta, dprime)
    basis = _subspace_basis(gm.psi0, gm.dpsi, dprime)
    cols = np.column_stack([gm.psi0, dpsi_new[0], dpsi_new[1]])
    X = basis.conj().T @ cols
    Y = np.column_stack([std.psi0, std.dpsi[0], std.dpsi[1]])
    U = polar_unitary(Y @ np.linalg.pinv(X))
    return std, ReparamRecord(A, U, basis)


def rotation_unitary(std, Q):
    """Unitary fixing ``psi0`` and sending ``psi_j`` to ``sum_l Q_jl psi_l``.

    Only proper rotations (``det Q = +1``) are realisable; a reflection would
    conjugate the imaginary part of ``<psi_1|psi_2>``.
    """
    Q = check_orthogonal(Q)
    if np.linalg.det(Q) < 0:
        raise ValueError("rotation_unitary needs det Q = +1; reflections have no unitary realisation")
    Y = np.column_stack([std.psi0, std.dpsi[0], std.dpsi[1]])
    rotated = Q @ std.dpsi
    YQ = np.column_stack([std.psi0, rotated[0], rotated[1]])
    return polar_unitary(YQ @ np.linalg.pinv(Y))


def canonical_q(S, tol=1e-14):
    """Proper rotation ``Q`` with ``Q^T S Q`` diagonal, largest eigenvalue first."""
    S = np.asarray(S, dtype=float)
    S = 0.5 * (S + S.T)
    vals, vecs = np.linalg.eigh(S)
    if abs(vals[1] - vals[0]) <= tol * max(abs(vals).max(), 1e-300):
        return np.eye(2)
    Q = vecs[:, ::-1].copy()
    col = Q[:, 0]
    lead = col[np.flatnonzero(np.abs(col) > 1e-15)[0]]
    Q[:, 0] *= np.sign(lead)
    if np.linalg.det(Q) < 0:
        Q[:, 1] *= -1
    return Q
