"""Input checking helpers, in the spirit of ``sklearn.utils.validation``."""
import numpy as np

from .exceptions import ModelError
from .tolerances import HERMITIAN_TOL, NORM_TOL, PSD_TOL


def check_state(psi, name="psi0", tol=NORM_TOL):
    """Return ``psi`` as a 1-d complex array, checking it is a unit vector."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ModelError(f"{name} must be a vector, got shape {psi.shape}")
    if psi.size < 2:
        raise ModelError(f"{name} must have dimension >= 2, got {psi.size}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ModelError(f"{name} must be normalised, |{name}| = {norm!r}")
    return psi


def check_derivatives(dpsi, dim, name="dpsi"):
    dpsi = np.asarray(dpsi, dtype=complex)
    if dpsi.shape != (2, dim):
        raise ModelError(f"{name} must have shape (2, {dim}), got {dpsi.shape}")
    if not np.all(np.isfinite(dpsi)):
        raise ModelError(f"{name} contains non-finite entries")
    return dpsi


def check_weight(weight, tol=PSD_TOL):
    """Return the 2x2 weight matrix as floats, checking symmetry and positivity."""
    if weight is None:
        return np.eye(2)
    w = np.asarray(weight, dtype=float)
    if w.shape != (2, 2):
        raise ModelError(f"weight must be 2x2, got shape {w.shape}")
    if np.max(np.abs(w - w.T)) > tol:
        raise ModelError("weight must be symmetric")
    if np.linalg.eigvalsh(w).min() < -tol:
        raise ModelError("weight must be positive semidefinite")
    return 0.5 * (w + w.T)


def check_hermitian(op, name="operator", tol=HERMITIAN_TOL):
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ModelError(f"{name} must be a square matrix, got shape {op.shape}")
    scale = max(1.0, np.max(np.abs(op)))
    if np.max(np.abs(op - op.conj().T)) > tol * scale:
        raise ModelError(f"{name} must be Hermitian")
    return op


def check_orthogonal(q, tol=1e-12):
    q = np.asarray(q, dtype=float)
    if q.shape != (2, 2):
        raise ValueError(f"Q must be 2x2, got shape {q.shape}")
    if np.max(np.abs(q.T @ q - np.eye(2))) > tol:
        raise ValueError("Q must be orthogonal")
    return q


def sym_inv_sqrt(m):
    """Inverse square root of a symmetric positive-definite matrix."""
    vals, vecs = np.linalg.eigh(m)
    return (vecs / np.sqrt(vals)) @ vecs.T


def sym_sqrt(m):
    vals, vecs = np.linalg.eigh(m)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
