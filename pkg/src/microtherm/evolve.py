"""Time integration of the forward and time-reversed systems.

The integrator of record is the implicit midpoint rule

    (I - dt/2 A) U_{k+1} = (I + dt/2 A) U_k

which is exact on the quadratic invariant of the skew part of G A: for
conservative moduli the discrete energy is constant to round-off, and
with dissipation the per-step balance

    E_{k+1} - E_k = -dt * D((U_k + U_{k+1}) / 2)

holds exactly, D being the gradient-rate quadrature.  A classical
four-stage explicit scheme ("rk4") is available as a cross-check
integrator; it conserves nothing exactly and is never used by the
certificates.

The time-reversed problem is integrated forward in its own time
variable with its own operator (assemble_backward), not by negating dt.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discrete1d import (FIELDS, DiscreteOperator, Grid1D, State1D,
                         assemble_backward)
from .errors import DimensionMismatch, NonFinite, SolveFailure

__all__ = [
    "InitialData",
    "Trajectory",
    "MidpointStepper",
    "step_midpoint",
    "run_forward",
    "assemble_backward",
    "time_reversal",
]

_SOLVE_TOL = 1e-12


@dataclass(frozen=True)
class InitialData:
    """Initial values for the six fields; all finite, equal lengths."""

    u0: np.ndarray
    v0: np.ndarray
    tau0: np.ndarray
    theta0: np.ndarray
    r0: np.ndarray
    m0: np.ndarray

    def __post_init__(self):
        n = None
        for name in ("u0", "v0", "tau0", "theta0", "r0", "m0"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise DimensionMismatch(f"{name} must be a 1-D vector")
            if n is None:
                n = arr.size
            elif arr.size != n:
                raise DimensionMismatch(f"{name} has length {arr.size}, expected {n}")
            if not np.isfinite(arr).all():
                raise NonFinite(f"{name} contains non-finite entries")
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.u0.size

    @classmethod
    def zeros(cls, n: int) -> "InitialData":
        return cls(*(np.zeros(n) for _ in range(6)))

    @classmethod
    def from_state(cls, s: State1D) -> "InitialData":
        return cls(s.u, s.v, s.tau, s.theta, s.r, s.m)

    def to_state(self) -> State1D:
        return State1D(self.u0, self.v0, self.tau0, self.theta0, self.r0, self.m0)


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of one run.

    times[j] = j * snapshot_every * dt (so times[k] = k*dt when every
    step is kept); snapshots[0] is the initial state; dt is the
    integration step, scheme the integrator tag.
    """

    times: np.ndarray
    snapshots: tuple
    dt: float
    scheme: str
    snapshot_every: int = 1

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size != len(self.snapshots):
            raise DimensionMismatch("times and snapshots must have equal length")
        if times.size == 0 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing and start at 0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "snapshots", tuple(self.snapshots))

    def __len__(self):
        return len(self.snapshots)

    def stacked(self) -> np.ndarray:
        """All snapshots as one (n_snapshots, 6n) array."""
        return np.stack([s.to_vector() for s in self.snapshots])


class MidpointStepper:
    """Factored midpoint stepper for repeated steps at fixed dt.

    Factors (I - dt/2 A) once; each step checks the linear-solve
    residual against 1e-12 relative, applying one pass of iterative
    refinement before declaring failure.
    """

    def __init__(self, op: DiscreteOperator, dt: float):
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.op = op
        self.dt = float(dt)
        size = op.a_mat.shape[0]
        eye = sp.identity(size, format="csc")
        self._lhs = (eye - (dt / 2.0) * op.a_mat).tocsc()
        self._rhs_mat = (eye + (dt / 2.0) * op.a_mat).tocsr()
        try:
            self._lu = spla.splu(self._lhs)
        except RuntimeError as exc:  # singular factorization
            raise SolveFailure(f"midpoint matrix could not be factored: {exc}") from exc

    def step_vector(self, vec: np.ndarray) -> np.ndarray:
        rhs = self._rhs_mat @ vec
        out = self._lu.solve(rhs)
        scale = float(np.linalg.norm(rhs))
        resid = float(np.linalg.norm(self._lhs @ out - rhs))
        if resid > _SOLVE_TOL * scale:
            out = out + self._lu.solve(rhs - self._lhs @ out)
            resid = float(np.linalg.norm(self._lhs @ out - rhs))
            if resid > _SOLVE_TOL * scale:
                raise SolveFailure(
                    f"midpoint solve residual {resid:.3e} exceeds "
                    f"{_SOLVE_TOL:.0e} * |rhs| = {_SOLVE_TOL * scale:.3e}"
                )
        return out

    def step(self, s: State1D) -> State1D:
        return State1D.from_vector(self.step_vector(s.to_vector()))


def step_midpoint(op: DiscreteOperator, s: State1D, dt: float) -> State1D:
    """One implicit midpoint step.  Factors the system each call; use
    run_forward (or MidpointStepper directly) for long runs."""
    return MidpointStepper(op, dt).step(s)


def _rk4_step(a_mat, vec, dt):
    k1 = a_mat @ vec
    k2 = a_mat @ (vec + 0.5 * dt * k1)
    k3 = a_mat @ (vec + 0.5 * dt * k2)
    k4 = a_mat @ (vec + dt * k3)
    return vec + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def run_forward(op: DiscreteOperator, init: InitialData, dt: float,
                n_steps: int, snapshot_every: int = 1,
                scheme: str = "midpoint") -> Trajectory:
    """Integrate n_steps steps from init, keeping every
    snapshot_every-th state (plus the initial one).

    Deterministic: identical inputs give bitwise-identical snapshots.
    """
    if init.n != op.grid.n_interior:
        raise DimensionMismatch(
            f"initial data has {init.n} nodes, operator grid has {op.grid.n_interior}"
        )
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    if snapshot_every < 1:
        raise ValueError(f"snapshot_every must be >= 1, got {snapshot_every}")
    if n_steps % snapshot_every:
        raise ValueError(
            f"n_steps = {n_steps} is not a multiple of snapshot_every = {snapshot_every}"
        )
    if scheme not in ("midpoint", "rk4"):
        raise ValueError(f"unknown scheme {scheme!r}")

    vec = init.to_state().to_vector()
    snaps = [State1D.from_vector(vec.copy())]
    if n_steps:
        if scheme == "midpoint":
            stepper = MidpointStepper(op, dt)
            advance = stepper.step_vector
        else:
            advance = lambda v: _rk4_step(op.a_mat, v, dt)
        for k in range(1, n_steps + 1):
            vec = advance(vec)
            if k % snapshot_every == 0:
                snaps.append(State1D.from_vector(vec.copy()))
    times = np.arange(len(snaps)) * (snapshot_every * dt)
    return Trajectory(times=times, snapshots=tuple(snaps), dt=float(dt),
                      scheme=scheme, snapshot_every=int(snapshot_every))


def time_reversal(s: State1D) -> State1D:
    """Flip the rate fields (v, theta, m); the map S with
    A_bwd = -S A_fwd S."""
    return State1D(s.u, -s.v, s.tau, -s.theta, s.r, -s.m)
