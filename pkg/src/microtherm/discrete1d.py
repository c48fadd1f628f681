"""Uniform-grid discretization of the 1D coupled system.

Layout: n_interior nodes x_j = j*h, j = 1..n, h = L/(n+1); the fields
u, tau, R satisfy homogeneous Dirichlet conditions, realized as zero
ghost values at x_0 and x_{n+1}.  The stacked state orders the six
fields as (u, v, tau, theta, R, M) where v, theta, M are the time
rates.

Two structural choices make the energy identities exact in the
discrete setting (up to round-off):

* the centered first difference with zero ghosts is exactly
  antisymmetric, so the velocity/temperature/microtemperature
  couplings drop out of d/dt (U^T G U) identically;
* gradients inside the energy are taken on the n+1 staggered
  intervals (forward differences including the boundary cells), whose
  summation-by-parts identity

      sum_i h * (df)_i (dg)_i = - sum_j h * f_j (Lap g)_j

  holds exactly, pairing the stiffness rows of A with the gradient
  blocks of G.

The Gram matrix G realizes twice the energy: U^T G U =
sum h*(rho v^2 + c_cap theta^2 + alpha_m M^2) + sum_i h*(m_uu (u')^2 +
2 m_ur u'R' + k_cond (tau')^2 + m_rr (R')^2).
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, InvalidGrid, InvalidMaterial
from .material import Moduli1D

__all__ = [
    "FIELDS",
    "Grid1D",
    "State1D",
    "DiscreteOperator",
    "second_difference",
    "first_difference",
    "staggered_difference",
    "assemble_operator",
    "assemble_backward",
    "gram_norm",
]

FIELDS = ("u", "v", "tau", "theta", "r", "m")


@dataclass(frozen=True)
class Grid1D:
    """Uniform interior grid on (0, length) with zero Dirichlet boundaries."""

    n_interior: int
    length: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n_interior, (int, np.integer)) or self.n_interior < 2:
            raise InvalidGrid(f"n_interior must be an integer >= 2, got {self.n_interior!r}")
        if not self.length > 0:
            raise InvalidGrid(f"length must be positive, got {self.length!r}")
        object.__setattr__(self, "n_interior", int(self.n_interior))
        object.__setattr__(self, "length", float(self.length))

    @property
    def h(self) -> float:
        return self.length / (self.n_interior + 1)

    @property
    def nodes(self) -> np.ndarray:
        """Interior node coordinates x_j = j*h."""
        return np.arange(1, self.n_interior + 1) * self.h


@dataclass(frozen=True)
class State1D:
    """The six grid fields at one time instant.

    u: displacement, v: velocity, tau: thermal displacement,
    theta: temperature, r: microtemperature displacement,
    m: microtemperature.  Along any computed trajectory v, theta, m
    are the time rates of u, tau, r.
    """

    u: np.ndarray
    v: np.ndarray
    tau: np.ndarray
    theta: np.ndarray
    r: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        n = None
        for name in FIELDS:
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise DimensionMismatch(f"field {name} must be a 1-D vector")
            if n is None:
                n = arr.size
            elif arr.size != n:
                raise DimensionMismatch(
                    f"field {name} has length {arr.size}, expected {n}"
                )
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.u.size

    @classmethod
    def zeros(cls, n: int) -> "State1D":
        return cls(*(np.zeros(n) for _ in FIELDS))

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "State1D":
        vec = np.asarray(vec, dtype=float)
        if vec.ndim != 1 or vec.size % 6:
            raise DimensionMismatch(
                f"stacked state must have length 6n, got shape {vec.shape}"
            )
        n = vec.size // 6
        return cls(*(vec[k * n:(k + 1) * n] for k in range(6)))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([getattr(self, name) for name in FIELDS])


class DiscreteOperator(NamedTuple):
    """Sparse realization of the evolution operator and the energy Gram.

    a_mat: 6n x 6n generator of dU/dt = A U; g_mat: symmetric positive
    definite Gram with U^T G U = 2 * energy; time_sign: +1 for the
    forward system, -1 for the time-reversed one.  Treat as read-only.
    """

    a_mat: sp.csr_matrix
    g_mat: sp.csr_matrix
    moduli: Moduli1D
    grid: Grid1D
    time_sign: int = 1

    @property
    def n(self) -> int:
        return self.grid.n_interior


def _as_field(f, h):
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise ValueError(f"need a 1-D vector of length >= 2, got shape {f.shape}")
    if not h > 0:
        raise ValueError(f"spacing must be positive, got {h}")
    return f


def second_difference(f, h):
    """3-point Laplacian (f_{j-1} - 2 f_j + f_{j+1}) / h^2, zero ghosts."""
    f = _as_field(f, h)
    out = -2.0 * f
    out[:-1] += f[1:]
    out[1:] += f[:-1]
    return out / (h * h)


def first_difference(f, h):
    """Centered gradient (f_{j+1} - f_{j-1}) / (2h), zero ghosts.

    Exactly antisymmetric under the plain dot product:
    <D f, g> + <f, D g> = 0 for any equal-length f, g.
    """
    f = _as_field(f, h)
    out = np.zeros_like(f)
    out[:-1] += f[1:]
    out[1:] -= f[:-1]
    return out / (2.0 * h)


def staggered_difference(f, h):
    """Forward differences (f_{i+1} - f_i)/h over all n+1 intervals.

    Includes the two boundary cells with zero ghost values; this is the
    gradient sampling used by the energy quadrature.
    """
    f = _as_field(f, h)
    out = np.empty(f.size + 1)
    out[0] = f[0] / h
    out[1:-1] = np.diff(f) / h
    out[-1] = -f[-1] / h
    return out


def _check_moduli(m: Moduli1D):
    det = m.m_uu * m.m_rr - m.m_ur * m.m_ur
    bad = (
        m.rho <= 0 or m.c_cap <= 0 or m.alpha_m <= 0
        or m.m_uu <= 0 or det <= 0 or m.k_cond <= 0
        or m.h_cond < 0 or m.m_rr_rate < 0
    )
    if bad:
        raise InvalidMaterial(
            "moduli violate the model hypotheses: "
            f"rho={m.rho}, c_cap={m.c_cap}, alpha_m={m.alpha_m}, "
            f"m_uu={m.m_uu}, det={det}, k_cond={m.k_cond}, "
            f"h_cond={m.h_cond}, m_rr_rate={m.m_rr_rate}"
        )


def _difference_matrices(n, h):
    off = np.ones(n - 1)
    lap = sp.diags([off, np.full(n, -2.0), off], (-1, 0, 1), format="csr") / (h * h)
    grad = sp.diags([-off, off], (-1, 1), format="csr") / (2.0 * h)
    return lap, grad


def _assemble(grid: Grid1D, m: Moduli1D, time_sign: int) -> DiscreteOperator:
    if not isinstance(grid, Grid1D):
        raise InvalidGrid(f"expected Grid1D, got {type(grid).__name__}")
    _check_moduli(m)
    n, h = grid.n_interior, grid.h
    lap, grad = _difference_matrices(n, h)
    eye = sp.identity(n, format="csr")

    s = float(time_sign)
    # the time reversal negates exactly the rate couplings:
    # beta, varpi+hbar, h_cond, m_rr_rate
    b = s * m.beta
    p = s * m.varpi_plus_hbar
    hc = s * m.h_cond
    q = s * m.m_rr_rate

    # rows: du/dt = v, dtau/dt = theta, dr/dt = m, plus the three
    # accelerations divided by their inertias
    a_mat = sp.bmat([
        [None, eye, None, None, None, None],
        [m.m_uu / m.rho * lap, None, None, -b / m.rho * grad, m.m_ur / m.rho * lap, None],
        [None, None, None, eye, None, None],
        [None, -b / m.c_cap * grad, m.k_cond / m.c_cap * lap, hc / m.c_cap * lap, None,
         -p / m.c_cap * grad],
        [None, None, None, None, None, eye],
        [m.m_ur / m.alpha_m * lap, None, None, -p / m.alpha_m * grad,
         m.m_rr / m.alpha_m * lap, q / m.alpha_m * lap],
    ], format="csr")

    # stiff = tridiag(-1,2,-1)/h realizes the staggered-gradient
    # quadrature: f @ stiff @ f = h * sum_i (staggered_difference f)_i^2
    stiff = (-h) * lap
    g_mat = sp.bmat([
        [m.m_uu * stiff, None, None, None, m.m_ur * stiff, None],
        [None, m.rho * h * eye, None, None, None, None],
        [None, None, m.k_cond * stiff, None, None, None],
        [None, None, None, m.c_cap * h * eye, None, None],
        [m.m_ur * stiff, None, None, None, m.m_rr * stiff, None],
        [None, None, None, None, None, m.alpha_m * h * eye],
    ], format="csr")

    return DiscreteOperator(a_mat=a_mat, g_mat=g_mat, moduli=m, grid=grid,
                            time_sign=int(time_sign))


def assemble_operator(g: Grid1D, m: Moduli1D) -> DiscreteOperator:
    """Assemble the forward evolution operator and energy Gram matrix.

    For conservative moduli (h_cond = m_rr_rate = 0) the assembled pair
    satisfies U^T G A U = 0 for every U; with dissipation it satisfies
    U^T G A U = -(h_cond |theta'|^2 + m_rr_rate |M'|^2) * h, both up to
    round-off.
    """
    return _assemble(g, m, +1)


def assemble_backward(g: Grid1D, m: Moduli1D) -> DiscreteOperator:
    """Assemble the time-reversed operator.

    Equivalent to negating the rate couplings (beta, varpi+hbar,
    h_cond, m_rr_rate); identically A_bwd = -S A_fwd S where S flips
    the signs of v, theta, M.
    """
    return _assemble(g, m, -1)


def gram_norm(op: DiscreteOperator, s: State1D) -> float:
    """Energy norm sqrt(U^T G U) = sqrt(2 * energy)."""
    if s.n != op.grid.n_interior:
        raise DimensionMismatch(
            f"state has {s.n} nodes, operator grid has {op.grid.n_interior}"
        )
    vec = s.to_vector()
    val = float(vec @ (op.g_mat @ vec))
    # clamp tiny negative round-off on near-zero states
    return float(np.sqrt(max(val, 0.0)))
