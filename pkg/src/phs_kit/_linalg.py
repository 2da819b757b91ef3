"""Small shared linear-algebra helpers (numerical rank, subspaces)."""

import numpy as np

EPS = np.finfo(float).eps


def as_matrix(a, name="matrix"):
    """Return ``a`` as a 2-D float array (no copy if already one)."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    return m


def rank_tolerance(shape, smax):
    """Numerical rank threshold: max(shape) * eps * largest singular value."""
    return max(shape) * EPS * smax


def numerical_rank(m):
    """Rank of ``m`` with the documented threshold.

    Returns
    -------
    rank : int
    svals : ndarray
        All singular values (descending).
    threshold : float
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return 0, np.zeros(0), 0.0
    svals = np.linalg.svd(m, compute_uv=False)
    threshold = rank_tolerance(m.shape, svals[0] if svals.size else 0.0)
    return int(np.count_nonzero(svals > threshold)), svals, threshold


def null_space_basis(m):
    """Orthonormal basis (columns) of ker(m), using the shared rank rule."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    ncols = m.shape[1]
    if m.size == 0 or not np.any(m):
        return np.eye(ncols)
    u, s, vt = np.linalg.svd(m, full_matrices=True)
    threshold = rank_tolerance(m.shape, s[0])
    rank = int(np.count_nonzero(s > threshold))
    return vt[rank:].T


def row_space_basis(m):
    """Orthonormal basis (columns) of im(m^T)."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0 or not np.any(m):
        return np.zeros((m.shape[1], 0))
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    threshold = rank_tolerance(m.shape, s[0])
    rank = int(np.count_nonzero(s > threshold))
    return vt[:rank].T


def subspace_angle_max(a, b):
    """Largest principal angle (radians) between the column spans of a, b.

    Computed through its sine (max singular value of the projection of one
    orthonormal basis onto the other's complement), which stays accurate for
    nearly identical subspaces where the cosine formula loses half the digits.
    """
    if a.shape[1] != b.shape[1]:
        return np.pi / 2 if max(a.shape[1], b.shape[1]) else 0.0
    if a.shape[1] == 0:
        return 0.0
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    rejection = qb - qa @ (qa.T @ qb)
    sine = np.linalg.svd(rejection, compute_uv=False).max()
    return float(np.arcsin(np.clip(sine, 0.0, 1.0)))
