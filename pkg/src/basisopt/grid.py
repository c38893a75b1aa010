"""Uniform 1D finite-difference grid, double-well potential and FD operators.

The domain is [-x_max, x_max] with homogeneous Dirichlet conditions; the
boundary nodes are excluded, so the grid carries n_points interior nodes
x_j = -x_max + j*dx, j = 1..n_points, dx = 2*x_max / (n_points + 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Radius beyond which the atomic densities vanish at double precision;
# default x_max = a_max + R_MAX recovers [-20, 20] for a_max = 5.
R_MAX = 15.0


@dataclass(frozen=True)
class Grid:
    """Uniform interior grid with Dirichlet endpoints excluded."""

    x_max: float
    n_points: int
    dx: float
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.points.setflags(write=False)


@dataclass(frozen=True)
class TridiagOperator:
    """Symmetric tridiagonal operator stored in banded form.

    `diag` has length n, `offdiag` length n-1 (a single value shared by the
    sub- and super-diagonal, so symmetry is structural).
    """

    diag: np.ndarray = field(repr=False)
    offdiag: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.diag.setflags(write=False)
        self.offdiag.setflags(write=False)

    @property
    def shape(self):
        n = self.diag.shape[0]
        return (n, n)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Apply the operator to a vector or to each column of a matrix."""
        v = np.asarray(v)
        out = self.diag[:, None] * v if v.ndim == 2 else self.diag * v
        if v.ndim == 2:
            out[:-1] += self.offdiag[:, None] * v[1:]
            out[1:] += self.offdiag[:, None] * v[:-1]
        else:
            out[:-1] += self.offdiag * v[1:]
            out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        """Materialize the full matrix (oracle/testing hook)."""
        n = self.diag.shape[0]
        dense = np.zeros((n, n))
        idx = np.arange(n)
        dense[idx, idx] = self.diag
        dense[idx[:-1], idx[:-1] + 1] = self.offdiag
        dense[idx[:-1] + 1, idx[:-1]] = self.offdiag
        return dense


def build_grid(x_max: float, n_points: int) -> Grid:
    """Build the uniform Dirichlet grid on [-x_max, x_max]."""
    if x_max <= 0:
        raise ValueError(f"x_max must be positive, got {x_max}")
    if n_points < 3:
        raise ValueError(f"n_points must be at least 3, got {n_points}")
    dx = 2.0 * x_max / (n_points + 1)
    points = -x_max + dx * np.arange(1, n_points + 1)
    return Grid(x_max=float(x_max), n_points=int(n_points), dx=dx, points=points)


def default_x_max(a_max: float) -> float:
    """Default box half-width for a measure with largest configuration a_max."""
    return a_max + R_MAX


def potential(a: float, x):
    """Double-well potential with minima at -a and +a.

    V_a(x) = (x-a)^2 (x+a)^2 / (8 a^2 + 4); a = 0 gives the quartic
    oscillator x^4 / 4.
    """
    if a < 0:
        raise ValueError(f"configuration half-distance must be >= 0, got {a}")
    x = np.asarray(x, dtype=float)
    return (x - a) ** 2 * (x + a) ** 2 / (8.0 * a**2 + 4.0)


def fd_hamiltonian(grid: Grid, a: float) -> TridiagOperator:
    """3-point FD discretization of -1/2 d^2/dx^2 + V_a with Dirichlet BCs."""
    inv_dx2 = 1.0 / grid.dx**2
    diag = inv_dx2 + potential(a, grid.points)
    offdiag = np.full(grid.n_points - 1, -0.5 * inv_dx2)
    return TridiagOperator(diag=diag, offdiag=offdiag)


def h1_metric(grid: Grid) -> TridiagOperator:
    """H1 metric I - Laplacian with the 3-point FD Laplacian; SPD."""
    inv_dx2 = 1.0 / grid.dx**2
    diag = np.full(grid.n_points, 1.0 + 2.0 * inv_dx2)
    offdiag = np.full(grid.n_points - 1, -inv_dx2)
    return TridiagOperator(diag=diag, offdiag=offdiag)


def identity_metric(grid: Grid) -> TridiagOperator:
    """L2 metric (identity) in the same banded form as h1_metric."""
    return TridiagOperator(
        diag=np.ones(grid.n_points), offdiag=np.zeros(grid.n_points - 1)
    )
