"""Reduced generalized eigenproblem machinery in the compressed basis.

The optimization variable is R in St(N, N_b); the working basis is
X_a = B_a I_R with I_R = diag(R, R). Everything here operates on the
compressed 2N x 2N offline matrices, never on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid
from .reference import OfflineConfigData

DEFAULT_COND_LIMIT = 1e12


class OvercompletenessError(RuntimeError):
    """Reduced overlap numerically singular (near-linear-dependent basis)."""

    def __init__(self, message: str, cond: float, a: float | None = None):
        super().__init__(message)
        self.cond = cond
        self.a = a


def expand(R: np.ndarray) -> np.ndarray:
    """I_R = diag(R, R): duplicate R for the two centers."""
    n, nb = R.shape
    out = np.zeros((2 * n, 2 * nb))
    out[:n, :nb] = R
    out[n:, nb:] = R
    return out


def hbs_coefficients(n_funcs: int, n_basis: int) -> np.ndarray:
    """First-n_basis-identity-columns R: the plain Hermite basis set."""
    if not 1 <= n_basis <= n_funcs:
        raise ValueError(f"need 1 <= n_basis <= n_funcs, got {n_basis}, {n_funcs}")
    return np.eye(n_funcs)[:, :n_basis].copy()


def reduced_overlap(s_block: np.ndarray, R: np.ndarray) -> np.ndarray:
    """I_R^T S I_R without forming I_R explicitly."""
    n = R.shape[0]
    out = np.block(
        [
            [R.T @ s_block[:n, :n] @ R, R.T @ s_block[:n, n:] @ R],
            [R.T @ s_block[n:, :n] @ R, R.T @ s_block[n:, n:] @ R],
        ]
    )
    return 0.5 * (out + out.T)


def inv_sqrt_spd(
    S: np.ndarray, cond_limit: float = DEFAULT_COND_LIMIT, a: float | None = None
):
    """Symmetric (Lowdin) inverse square root of an SPD matrix.

    Returns (S^{-1/2}, condition number). Raises OvercompletenessError when
    the spectrum is non-positive or the condition number exceeds cond_limit.
    """
    vals, vecs = np.linalg.eigh(0.5 * (S + S.T))
    smin, smax = vals[0], vals[-1]
    cond = np.inf if smin <= 0 else smax / smin
    if smin <= 0 or cond > cond_limit:
        where = "" if a is None else f" at a={a}"
        raise OvercompletenessError(
            f"overlap matrix ill-conditioned{where}: "
            f"min eigenvalue {smin:.3e}, condition number {cond:.3e}",
            cond=cond,
            a=a,
        )
    inv_sqrt = (vecs * vals**-0.5) @ vecs.T
    return 0.5 * (inv_sqrt + inv_sqrt.T), cond


@dataclass(frozen=True)
class ReducedGroundPair:
    """Two lowest Ritz pairs of the reduced generalized eigenproblem."""

    mu1: float
    mu2: float
    mu3: float  # third Ritz value, kept for gap diagnostics
    C: np.ndarray = field(repr=False)  # 2N_b x 2, S-orthonormal
    cond: float  # condition number of the reduced overlap

    @property
    def energy(self) -> float:
        return self.mu1 + self.mu2


def reduced_ground_pair(
    m_e_offline: np.ndarray,
    s_block: np.ndarray,
    R: np.ndarray,
    cond_limit: float = DEFAULT_COND_LIMIT,
    a: float | None = None,
) -> ReducedGroundPair:
    """Solve the reduced problem by Lowdin symmetric orthogonalization."""
    S_red = reduced_overlap(s_block, R)
    H_red = reduced_overlap(m_e_offline, R)
    S_inv_sqrt, cond = inv_sqrt_spd(S_red, cond_limit, a=a)
    H_tilde = S_inv_sqrt @ H_red @ S_inv_sqrt
    vals, vecs = np.linalg.eigh(0.5 * (H_tilde + H_tilde.T))
    C = S_inv_sqrt @ vecs[:, :2]
    mu3 = float(vals[2]) if vals.shape[0] > 2 else np.inf
    return ReducedGroundPair(
        mu1=float(vals[0]), mu2=float(vals[1]), mu3=mu3, C=C, cond=cond
    )


def lcao_density(
    b_columns: np.ndarray, R: np.ndarray, C: np.ndarray, grid: Grid
) -> np.ndarray:
    """Grid density of the two occupied LCAO orbitals.

    The sqrt(dx) column convention makes B I_R C unit-norm coefficient
    vectors; dividing the squared orbitals by dx restores a true density
    with dx * sum(rho) = 2.
    """
    orbitals = b_columns @ (expand(R) @ C)  # N_g x 2
    return (orbitals**2).sum(axis=1) / grid.dx


def hbs_offline_pair(data: OfflineConfigData, n_basis: int) -> ReducedGroundPair:
    """Reduced solve for the plain Hermite basis of size n_basis."""
    R = hbs_coefficients(data.n_funcs, n_basis)
    return reduced_ground_pair(data.m_e_offline, data.s_b, R, a=data.a)
