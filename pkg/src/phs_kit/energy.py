"""Hamiltonians, discrete gradients, and passive resistive relations."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._linalg import as_matrix
from .errors import DomainError, StructureError

__all__ = [
    "QuadraticHamiltonian",
    "GeneralHamiltonian",
    "LinearGraph",
    "Parametric",
    "Modulated",
    "ResistiveValidation",
    "ham_eval",
    "ham_grad",
    "discrete_gradient",
    "resistive_check",
    "resistive_residual",
    "check_gradient",
]


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """H(x) = 1/2 x^T H x + b^T x + c with symmetric (self-dual) H."""

    H: np.ndarray
    b: np.ndarray = None
    c: float = 0.0
    sym_tol: float = 1e-10

    def __post_init__(self):
        H = as_matrix(self.H, "H")
        if H.shape[0] != H.shape[1]:
            raise StructureError(f"H must be square, got {H.shape}")
        b = np.zeros(H.shape[0]) if self.b is None else np.atleast_1d(np.asarray(self.b, float))
        if b.shape != (H.shape[0],):
            raise StructureError(f"b must have length {H.shape[0]}, got {b.shape}")
        defect = float(np.max(np.abs(H - H.T))) if H.size else 0.0
        if defect > self.sym_tol:
            raise StructureError(f"H is not symmetric: max |H - H^T| = {defect:.3e}")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self):
        return self.H.shape[0]

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ (self.H @ x) + self.b @ x + self.c)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return self.H @ x + self.b


@dataclass(frozen=True)
class GeneralHamiltonian:
    """Differentiable energy given by user callables for value and gradient.

    ``domain`` (optional) is a predicate for the open set on which the energy
    is defined; evaluations outside raise DomainError.
    """

    value_fn: Callable[[np.ndarray], float]
    gradient_fn: Callable[[np.ndarray], np.ndarray]
    dim: int
    domain: Optional[Callable[[np.ndarray], bool]] = None

    def _check(self, x):
        if self.domain is not None and not self.domain(x):
            raise DomainError(f"state outside Hamiltonian domain: {x}")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        self._check(x)
        return float(self.value_fn(x))

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        self._check(x)
        g = np.atleast_1d(np.asarray(self.gradient_fn(x), dtype=float))
        if g.shape != (self.dim,):
            raise StructureError(f"gradient must have length {self.dim}, got {g.shape}")
        return g


def ham_eval(h, x):
    """Energy value H(x)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (h.dim,):
        raise StructureError(f"state must have length {h.dim}, got {x.shape}")
    return h.value(x)


def ham_grad(h, x):
    """Energy gradient (the co-energy variable at state x)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (h.dim,):
        raise StructureError(f"state must have length {h.dim}, got {x.shape}")
    return h.gradient(x)


def discrete_gradient(h, x, y):
    """Midpoint discrete gradient with chord correction.

    Returns g = grad H(m) + (H(y) - H(x) - grad H(m)·(y-x)) (y-x)/|y-x|^2
    with m the midpoint, so that g·(y-x) = H(y) - H(x) holds to roundoff.
    For x == y this is grad H(x); for quadratic H the correction vanishes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = y - x
    nd2 = float(d @ d)
    g_mid = ham_grad(h, 0.5 * (x + y))
    if nd2 == 0.0:
        return g_mid
    correction = (ham_eval(h, y) - ham_eval(h, x) - g_mid @ d) / nd2
    return g_mid + correction * d


def check_gradient(h, points, step=1e-6, rtol=1e-5):
    """Verify gradient/value consistency by central differences at given points.

    Returns the worst relative error; raises nothing.  Intended for validating
    user-supplied GeneralHamiltonian pairs.
    """
    worst = 0.0
    for x in points:
        x = np.asarray(x, dtype=float)
        g = ham_grad(h, x)
        fd = np.zeros_like(g)
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = step
            fd[i] = (ham_eval(h, x + e) - ham_eval(h, x - e)) / (2 * step)
        scale = max(1.0, float(np.max(np.abs(g))))
        worst = max(worst, float(np.max(np.abs(fd - g))) / scale)
    return worst


# --- resistive relations ----------------------------------------------------


@dataclass(frozen=True)
class LinearGraph:
    """Graph relation e_R = -R f_R; passive iff sym(R) is PSD."""

    R: np.ndarray

    def __post_init__(self):
        R = as_matrix(self.R, "R") if np.ndim(self.R) == 2 else np.atleast_2d(np.asarray(self.R, float))
        if R.shape[0] != R.shape[1]:
            raise StructureError(f"R must be square, got {R.shape}")
        object.__setattr__(self, "R", R)

    @property
    def n_r(self):
        return self.R.shape[0]

    def effort(self, f_r):
        return -self.R @ np.asarray(f_r, dtype=float)


@dataclass(frozen=True)
class Parametric:
    """Image relation f_R = A λ, e_R = B λ; passive iff sym(A^T B) is NSD."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        if A.shape != B.shape:
            raise StructureError(f"A and B must have equal shape, got {A.shape}, {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n_r(self):
        return self.A.shape[0]

    @property
    def n_lambda(self):
        return self.A.shape[1]


@dataclass(frozen=True)
class Modulated:
    """State-modulated family of resistive relations.

    ``family`` maps a state to a LinearGraph or Parametric; passivity is only
    checkable at sampled states (relative closedness of the family is a
    modeling assumption, not decided numerically).
    """

    family: Callable[[np.ndarray], object]
    n_r: int

    def at(self, x):
        rel = self.family(np.asarray(x, dtype=float))
        if isinstance(rel, Modulated):
            raise StructureError("modulated family must resolve to a concrete relation")
        if rel.n_r != self.n_r:
            raise StructureError(f"family returned n_r = {rel.n_r}, expected {self.n_r}")
        return rel


@dataclass(frozen=True)
class ResistiveValidation:
    """Result of a passivity check on a resistive relation."""

    passed: bool
    min_eig: float
    max_eig: float
    tol: float
    kind: str
    states_checked: int = 0

    def as_dict(self):
        return {
            "passed": bool(self.passed),
            "min_eig": float(self.min_eig),
            "max_eig": float(self.max_eig),
            "tol": float(self.tol),
            "kind": self.kind,
            "states_checked": int(self.states_checked),
        }


def _sym_eigrange(m):
    if m.size == 0:
        return 0.0, 0.0
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    return float(w[0]), float(w[-1])


def resistive_check(rel, tol=1e-10, states=None):
    """Passivity check via eigenvalues of the relevant symmetric part.

    LinearGraph passes iff sym(R) >= -tol*scale; Parametric iff
    sym(A^T B) <= tol*scale.  A Modulated relation is checked at the supplied
    sample states (required).  The eigenvalue tolerance is scaled by the
    matrix max-norm to be robust to roundoff.
    """
    if tol <= 0:
        raise StructureError("tol must be positive")
    if rel is None:
        return ResistiveValidation(True, 0.0, 0.0, tol, "none")
    if isinstance(rel, Modulated):
        if states is None or len(states) == 0:
            raise StructureError("checking a modulated relation requires sample states")
        lo, hi, ok = np.inf, -np.inf, True
        for x in states:
            sub = resistive_check(rel.at(x), tol=tol)
            lo, hi, ok = min(lo, sub.min_eig), max(hi, sub.max_eig), ok and sub.passed
        return ResistiveValidation(ok, lo, hi, tol, "modulated", states_checked=len(states))
    if isinstance(rel, LinearGraph):
        lo, hi = _sym_eigrange(rel.R)
        scale = max(1.0, float(np.max(np.abs(rel.R))) if rel.R.size else 0.0)
        return ResistiveValidation(lo >= -tol * scale, lo, hi, tol, "linear_graph")
    if isinstance(rel, Parametric):
        m = rel.A.T @ rel.B
        lo, hi = _sym_eigrange(m)
        scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
        return ResistiveValidation(hi <= tol * scale, lo, hi, tol, "parametric")
    raise StructureError(f"unknown resistive relation type: {type(rel)!r}")


def resistive_residual(rel, x, f_r, e_r):
    """Distance of (f_R, e_R) to the relation (at state x for modulated ones).

    LinearGraph: ||e_R + R f_R||.  Parametric: Euclidean distance of the
    stacked pair to im[A; B].  Returns 0.0 for a trivial (None) relation.
    """
    f_r = np.atleast_1d(np.asarray(f_r, dtype=float))
    e_r = np.atleast_1d(np.asarray(e_r, dtype=float))
    if rel is None:
        if f_r.size or e_r.size:
            raise StructureError("system has no resistive port but resistive values were given")
        return 0.0
    if f_r.shape != (rel.n_r,) or e_r.shape != (rel.n_r,):
        raise StructureError(f"resistive values must have length {rel.n_r}")
    if isinstance(rel, Modulated):
        return resistive_residual(rel.at(x), x, f_r, e_r)
    if isinstance(rel, LinearGraph):
        return float(np.linalg.norm(e_r + rel.R @ f_r))
    if isinstance(rel, Parametric):
        stacked = np.vstack([rel.A, rel.B])
        v = np.concatenate([f_r, e_r])
        lam, *_ = np.linalg.lstsq(stacked, v, rcond=None)
        return float(np.linalg.norm(v - stacked @ lam))
    raise StructureError(f"unknown resistive relation type: {type(rel)!r}")
