"""System assembly, trajectories, and pointwise residuals of the inclusion."""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .dirac import DiracKernelRep, validate_kernel
from .energy import Modulated, ham_grad, resistive_check, resistive_residual
from .errors import StructureError

__all__ = [
    "PhsSystem",
    "Trajectory",
    "PortSignal",
    "StrongResidual",
    "assemble",
    "strong_residual",
]

CAUSALITIES = ("effort", "flow")


@dataclass(frozen=True)
class PhsSystem:
    """An assembled port-Hamiltonian DAE.

    Holds a validated Dirac structure, the Hamiltonian, the resistive
    relation (None when n_r = 0) and the port causality: one entry per port
    channel, "effort" when the effort half is prescribed as input, "flow"
    when the flow half is.
    """

    dirac: DiracKernelRep
    ham: object
    res: object = None
    causality: tuple = ()
    metadata: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.dirac.n

    @property
    def n_s(self):
        return self.dirac.n_s

    @property
    def n_r(self):
        return self.dirac.n_r

    @property
    def n_p(self):
        return self.dirac.n_p

    def grad(self, x):
        return ham_grad(self.ham, x)

    def resistive_at(self, x):
        """Concrete relation for the given state (resolves modulation)."""
        if isinstance(self.res, Modulated):
            return self.res.at(x)
        return self.res


def assemble(dirac, ham, res=None, causality=(), dirac_tol=1e-10, resistive_tol=1e-10,
             resistive_states=None):
    """Validate the components and build a PhsSystem.

    All component validations are re-run here; the tolerances used are
    recorded in the system metadata.  A modulated resistive relation is
    checked at ``resistive_states`` (defaults to the origin).

    Raises
    ------
    StructureError
        On dimension inconsistencies or any failed validation.
    """
    report = validate_kernel(dirac, tol=dirac_tol)
    if not report.passed:
        raise StructureError(
            f"Dirac validation failed: rank {report.rank}/{report.rank_required}, "
            f"skew defect {report.skew_defect:.3e}"
        )
    if ham.dim != dirac.n_s:
        raise StructureError(f"Hamiltonian dimension {ham.dim} != n_s = {dirac.n_s}")
    if dirac.n_r == 0:
        if res is not None and getattr(res, "n_r", 0) != 0:
            raise StructureError("system has n_r = 0 but a resistive relation was given")
        res = None
        res_report = resistive_check(None)
    else:
        if res is None:
            raise StructureError(f"system has n_r = {dirac.n_r} but no resistive relation")
        if res.n_r != dirac.n_r:
            raise StructureError(f"resistive dimension {res.n_r} != n_r = {dirac.n_r}")
        states = resistive_states
        if isinstance(res, Modulated) and states is None:
            states = [np.zeros(dirac.n_s)]
        res_report = resistive_check(res, tol=resistive_tol, states=states)
        if not res_report.passed:
            raise StructureError(
                f"resistive relation failed the passivity check (min/max sym eig "
                f"{res_report.min_eig:.3e}/{res_report.max_eig:.3e})"
            )
    causality = tuple(causality)
    if len(causality) != dirac.n_p:
        raise StructureError(f"causality needs {dirac.n_p} entries, got {len(causality)}")
    for c in causality:
        if c not in CAUSALITIES:
            raise StructureError(f"causality entries must be one of {CAUSALITIES}, got {c!r}")
    metadata = {
        "dirac_tol": dirac_tol,
        "resistive_tol": resistive_tol,
        "dirac_validation": report.as_dict(),
        "resistive_validation": res_report.as_dict(),
    }
    return PhsSystem(dirac=dirac, ham=ham, res=res, causality=causality, metadata=metadata)


@dataclass(frozen=True)
class StrongResidual:
    """Pointwise defect of the differential inclusion at given data."""

    dirac_defect: float
    resistive_defect: float


def strong_residual(sys, x, xdot, f_r=None, e_r=None, f_p=None, e_p=None):
    """Pointwise residual of the inclusion at (x, xdot) and channel values.

    dirac_defect = || F (-xdot; f_R; f_P) + G (grad H(x); e_R; e_P) ||_2,
    resistive_defect = distance of (f_R, e_R) to the relation at x.
    """
    d = sys.dirac
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xdot = np.atleast_1d(np.asarray(xdot, dtype=float))
    f_r = np.zeros(d.n_r) if f_r is None else np.atleast_1d(np.asarray(f_r, float))
    e_r = np.zeros(d.n_r) if e_r is None else np.atleast_1d(np.asarray(e_r, float))
    f_p = np.zeros(d.n_p) if f_p is None else np.atleast_1d(np.asarray(f_p, float))
    e_p = np.zeros(d.n_p) if e_p is None else np.atleast_1d(np.asarray(e_p, float))
    if x.shape != (d.n_s,) or xdot.shape != (d.n_s,):
        raise StructureError(f"x and xdot must have length {d.n_s}")
    for v, m, name in ((f_r, d.n_r, "f_R"), (e_r, d.n_r, "e_R"),
                       (f_p, d.n_p, "f_P"), (e_p, d.n_p, "e_P")):
        if v.shape != (m,):
            raise StructureError(f"{name} must have length {m}, got {v.shape}")
    flows = np.concatenate([-xdot, f_r, f_p])
    efforts = np.concatenate([sys.grad(x), e_r, e_p])
    dirac_defect = float(np.linalg.norm(d.F @ flows + d.G @ efforts))
    resistive_defect = resistive_residual(sys.res, x, f_r, e_r)
    return StrongResidual(dirac_defect=dirac_defect, resistive_defect=resistive_defect)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution data on a uniform time grid.

    ``x`` holds node samples ((M+1) x n_s); the channel arrays hold one value
    per step interval (M x n_r, M x n_p), to be read as piecewise-constant
    interval values (they may jump between intervals).
    """

    t: np.ndarray
    x: np.ndarray
    f_r: np.ndarray
    e_r: np.ndarray
    f_p: np.ndarray
    e_p: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.t, dtype=float))
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        if t.ndim != 1 or t.size < 2:
            raise StructureError("time grid needs at least two nodes")
        m = t.size - 1
        if x.shape[0] != m + 1:
            raise StructureError(f"x must have {m + 1} rows, got {x.shape[0]}")
        steps = np.diff(t)
        dt = steps[0]
        # 1e-12*dt plus the float-representation floor of the node values
        tol = 1e-12 * abs(dt) + 8.0 * np.finfo(float).eps * float(np.max(np.abs(t)))
        if dt <= 0 or np.max(np.abs(steps - dt)) > tol:
            raise StructureError("time grid must be uniform and increasing (to 1e-12*dt)")
        arrays = {"t": t, "x": x}
        for name in ("f_r", "e_r", "f_p", "e_p"):
            a = np.asarray(getattr(self, name), dtype=float)
            a = a.reshape(m, -1) if a.size else np.zeros((m, 0))
            if a.shape[0] != m:
                raise StructureError(f"{name} must have {m} interval rows, got {a.shape[0]}")
            arrays[name] = a
        if arrays["f_r"].shape != arrays["e_r"].shape:
            raise StructureError("f_r and e_r must have equal shape")
        if arrays["f_p"].shape != arrays["e_p"].shape:
            raise StructureError("f_p and e_p must have equal shape")
        for name, a in arrays.items():
            object.__setattr__(self, name, a)

    @property
    def steps(self):
        return self.t.size - 1

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    @property
    def n_s(self):
        return self.x.shape[1]

    def channel_magnitude(self):
        """Largest absolute sample over all stored channels (for normalization)."""
        mags = [np.max(np.abs(self.x))]
        for a in (self.f_r, self.e_r, self.f_p, self.e_p):
            if a.size:
                mags.append(np.max(np.abs(a)))
        return float(max(mags))

    def check_shapes(self, sys):
        """Raise StructureError if the sample widths do not match the system."""
        if self.x.shape[1] != sys.n_s:
            raise StructureError(f"trajectory n_s = {self.x.shape[1]} != system n_s = {sys.n_s}")
        if self.f_r.shape[1] != sys.n_r:
            raise StructureError(f"trajectory n_r = {self.f_r.shape[1]} != system n_r = {sys.n_r}")
        if self.f_p.shape[1] != sys.n_p:
            raise StructureError(f"trajectory n_p = {self.f_p.shape[1]} != system n_p = {sys.n_p}")


class PortSignal:
    """Prescribed input signals for port channels.

    Wraps a mapping ``channel index -> (t -> value)``; constants are accepted
    in place of callables.  Channels without an entry default to the constant
    zero signal.  Signals may be discontinuous; they are sampled, never
    integrated.
    """

    def __init__(self, signals: Optional[Dict[int, object]] = None):
        ready: Dict[int, Callable[[float], float]] = {}
        for k, v in (signals or {}).items():
            k = int(k)
            if callable(v):
                ready[k] = v
            else:
                const = float(v)
                ready[k] = (lambda c: (lambda t: c))(const)
        self._signals = ready

    @classmethod
    def coerce(cls, obj):
        if obj is None:
            return cls({})
        if isinstance(obj, cls):
            return obj
        if isinstance(obj, dict):
            return cls(obj)
        raise StructureError("port inputs must be a PortSignal or a dict {channel: signal}")

    def channels(self):
        return sorted(self._signals)

    def value(self, channel, t):
        fn = self._signals.get(int(channel))
        return 0.0 if fn is None else float(fn(t))

    def validate_channels(self, sys):
        prescribed = set(range(sys.n_p))
        extra = [k for k in self._signals if k not in prescribed]
        if extra:
            raise StructureError(f"input given for nonexistent port channels {extra}")
