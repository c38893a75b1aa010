"""Density-projection and energy-error criteria and their gradients in R.

Both criteria aggregate per-configuration terms over the sampling measure
(weights baked into the offline data). Summation order is fixed by the
measure ordering so values are bit-reproducible.
"""

from __future__ import annotations

import warnings
from enum import Enum

import numpy as np

from .galerkin import (
    DEFAULT_COND_LIMIT,
    expand,
    inv_sqrt_spd,
    reduced_ground_pair,
    reduced_overlap,
)
from .reference import OfflineConfigData

GAP_TOL = 1e-10


class CriterionKind(str, Enum):
    JA_L2 = "JA_L2"
    JA_H1 = "JA_H1"
    JE = "JE"

    @property
    def metric(self) -> str:
        return {"JA_L2": "L2", "JA_H1": "H1", "JE": "L2"}[self.value]


class DegenerateGapWarning(UserWarning):
    """Third Ritz value degenerate with the occupied pair."""


def _diag_blocks_sum(M: np.ndarray) -> np.ndarray:
    """M^{++} + M^{--} for a 2x2-block matrix with equal block shapes."""
    n = M.shape[0] // 2
    m = M.shape[1] // 2
    return M[:n, :m] + M[n:, m:]


def _ja_terms(R: np.ndarray, data: OfflineConfigData, cond_limit: float):
    """Shared solve for eval/grad of the projection criterion."""
    S_red = reduced_overlap(data.s_a_b, R)
    S_inv_sqrt, _ = inv_sqrt_spd(S_red, cond_limit, a=data.a)
    S_inv = S_inv_sqrt @ S_inv_sqrt
    I_R = expand(R)
    MI = data.m_a_offline @ I_R  # 2N x 2N_b
    return I_R, MI, S_inv


def eval_JA(
    R: np.ndarray,
    offline: list[OfflineConfigData],
    cond_limit: float = DEFAULT_COND_LIMIT,
) -> float:
    """-sum_n w_n Tr(M_A(a_n) I_R [S^A(B I_R)]^{-1} I_R^T)."""
    total = 0.0
    for data in offline:
        I_R, MI, S_inv = _ja_terms(R, data, cond_limit)
        total -= data.weight * float(np.sum((I_R @ S_inv) * MI))
    return total


def grad_JA(
    R: np.ndarray,
    offline: list[OfflineConfigData],
    cond_limit: float = DEFAULT_COND_LIMIT,
) -> np.ndarray:
    """Euclidean gradient of eval_JA with respect to R."""
    grad = np.zeros_like(R)
    for data in offline:
        I_R, MI, S_inv = _ja_terms(R, data, cond_limit)
        MIS = MI @ S_inv  # M_A^offline I_R S^{-1}
        # M_A(a, R) = M I_R S^{-1} - S^A(B) I_R S^{-1} I_R^T M I_R S^{-1}
        M_aR = MIS - data.s_a_b @ I_R @ S_inv @ (I_R.T @ MIS)
        grad -= 2.0 * data.weight * _diag_blocks_sum(M_aR)
    return grad


def _je_config(R: np.ndarray, data: OfflineConfigData, cond_limit: float):
    pair = reduced_ground_pair(
        data.m_e_offline, data.s_b, R, cond_limit=cond_limit, a=data.a
    )
    return pair, data.e_ref - pair.energy


def eval_JE(
    R: np.ndarray,
    offline: list[OfflineConfigData],
    cond_limit: float = DEFAULT_COND_LIMIT,
) -> float:
    """sum_n w_n |E_ref(a_n) - E_R(a_n)|^2."""
    total = 0.0
    for data in offline:
        _, residual = _je_config(R, data, cond_limit)
        total += data.weight * residual**2
    return total


def _grad_energy(R: np.ndarray, data: OfflineConfigData, pair) -> np.ndarray:
    """Euclidean gradient of E_R(a) = mu1 + mu2 with respect to R."""
    if pair.mu3 - pair.mu2 < GAP_TOL:
        warnings.warn(
            f"third Ritz value degenerate with the occupied pair at "
            f"a={data.a} (gap {pair.mu3 - pair.mu2:.3e})",
            DegenerateGapWarning,
            stacklevel=3,
        )
    C = pair.C
    P = C @ C.T
    Q = C @ np.diag([pair.mu1, pair.mu2]) @ C.T
    I_R = expand(R)
    # sum over blocks b, b' of M^{bb'} R P^{b'b} = diagonal blocks of M I_R P
    term_m = _diag_blocks_sum(data.m_e_offline @ I_R @ P)
    term_s = _diag_blocks_sum(data.s_b @ I_R @ Q)
    return 2.0 * (term_m - term_s)


def grad_JE(
    R: np.ndarray,
    offline: list[OfflineConfigData],
    cond_limit: float = DEFAULT_COND_LIMIT,
) -> np.ndarray:
    """Euclidean gradient of eval_JE with respect to R."""
    grad = np.zeros_like(R)
    for data in offline:
        pair, residual = _je_config(R, data, cond_limit)
        grad -= 2.0 * data.weight * residual * _grad_energy(R, data, pair)
    return grad


def make_criterion(kind: CriterionKind, offline: list[OfflineConfigData]):
    """Value-and-gradient callable for the optimizer."""
    if kind is CriterionKind.JE:

        def value_and_grad(R):
            return eval_JE(R, offline), grad_JE(R, offline)

    else:

        def value_and_grad(R):
            return eval_JA(R, offline), grad_JA(R, offline)

    return value_and_grad
