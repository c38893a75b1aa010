"""FD reference ground pairs, sampling measure and offline matrices.

All per-configuration quantities that do not depend on the coefficient
matrix R are precomputed here: the reference energy, the compressed
density-matrix factor (M_A^offline), the compressed Hamiltonian
(M_E^offline) and the Hermite-block overlaps. The rank-2 FD density matrix
is never materialized; it enters only through the 2 x 2N factor
G = Phi^T A B_a.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .grid import Grid, TridiagOperator, fd_hamiltonian, h1_metric
from .hermite import assemble_dimer

METRICS = ("L2", "H1")


class NumericalFailure(RuntimeError):
    """Eigensolver failure, tagged with the offending configuration."""


@dataclass(frozen=True)
class GroundPair:
    """Two lowest FD eigenpairs; eigenvectors are unit-norm in the
    sqrt(dx)-scaled convention (equivalently dx * phi^T phi = 1 unscaled)."""

    lambda1: float
    lambda2: float
    phi1: np.ndarray = field(repr=False)
    phi2: np.ndarray = field(repr=False)

    @property
    def energy(self) -> float:
        return self.lambda1 + self.lambda2


@dataclass(frozen=True)
class Measure:
    """Finite weighted sum of Dirac masses on the configuration axis."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.points) != len(self.weights):
            raise ValueError("points and weights must have equal length")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise ValueError("configurations must be strictly increasing")
        if self.points[0] <= 0:
            raise ValueError("configurations must be positive")

    @property
    def a_max(self) -> float:
        return self.points[-1]


def default_measure() -> Measure:
    """Ten uniform points on [1.5, 5].

    Each point carries the interval spacing 3.5/9 as its weight, so the
    aggregated criteria reproduce the reference tables (a Riemann-sum
    quadrature of the interval rather than a normalized average; the two
    conventions differ by the constant factor 35/9).
    """
    return uniform_measure(1.5, 5.0, 10)


def uniform_measure(a_min: float, a_max: float, count: int) -> Measure:
    """Uniformly spaced configurations with spacing weights."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        return Measure(points=(float(a_min),), weights=(1.0,))
    points = tuple(
        a_min + n * (a_max - a_min) / (count - 1) for n in range(count)
    )
    w = (a_max - a_min) / (count - 1)
    return Measure(points=points, weights=(w,) * count)


def solve_ground_pair(H: TridiagOperator, grid: Grid) -> GroundPair:
    """Two lowest eigenpairs of the symmetric tridiagonal FD Hamiltonian."""
    try:
        vals, vecs = scipy.linalg.eigh_tridiagonal(
            H.diag, H.offdiag, select="i", select_range=(0, 1)
        )
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalFailure(f"tridiagonal eigensolver failed: {exc}") from exc
    phi1, phi2 = vecs[:, 0], vecs[:, 1]
    for i, (lam, phi) in enumerate(zip(vals, (phi1, phi2)), start=1):
        res = np.linalg.norm(H.matvec(phi) - lam * phi)
        if res > 1e-8:
            raise NumericalFailure(
                f"eigenpair {i} residual {res:.3e} exceeds 1e-8"
            )
    return GroundPair(
        lambda1=float(vals[0]), lambda2=float(vals[1]), phi1=phi1, phi2=phi2
    )


@dataclass(frozen=True)
class OfflineConfigData:
    """R-independent compressed matrices for one configuration."""

    a: float
    weight: float
    e_ref: float
    m_a_offline: np.ndarray = field(repr=False)  # (A B)^T P_FD (A B), 2N x 2N
    s_a_b: np.ndarray = field(repr=False)  # B^T A B
    m_e_offline: np.ndarray = field(repr=False)  # B^T H_FD B
    s_b: np.ndarray = field(repr=False)  # B^T B

    @property
    def n_funcs(self) -> int:
        return self.s_b.shape[0] // 2


def _metric_operator(grid: Grid, metric: str):
    if metric == "L2":
        return None  # identity; skip the matvec entirely
    if metric == "H1":
        return h1_metric(grid)
    raise ValueError(f"unknown metric {metric!r}, expected one of {METRICS}")


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def build_offline_single(
    grid: Grid, a: float, weight: float, n_funcs: int, metric: str = "L2"
) -> OfflineConfigData:
    """Offline matrices for one configuration."""
    A = _metric_operator(grid, metric)
    H = fd_hamiltonian(grid, a)
    try:
        pair = solve_ground_pair(H, grid)
    except NumericalFailure as exc:
        raise NumericalFailure(f"reference solve failed at a={a}: {exc}") from exc
    B = assemble_dimer(grid, a, n_funcs).columns
    AB = B if A is None else A.matvec(B)
    phis = np.column_stack([pair.phi1, pair.phi2])
    G = phis.T @ AB  # 2 x 2N factor of the projected density matrix
    return OfflineConfigData(
        a=float(a),
        weight=float(weight),
        e_ref=pair.energy,
        m_a_offline=_symmetrize(G.T @ G),
        s_a_b=_symmetrize(B.T @ AB),
        m_e_offline=_symmetrize(B.T @ H.matvec(B)),
        s_b=_symmetrize(B.T @ B),
    )


def build_offline(
    grid: Grid,
    measure: Measure,
    n_funcs: int,
    metric: str = "L2",
    cache_dir: str | None = None,
) -> list[OfflineConfigData]:
    """Offline matrices for every support point of the measure.

    With cache_dir set, entries are loaded from disk when fresh and written
    atomically when recomputed.
    """
    out = []
    for a, w in zip(measure.points, measure.weights):
        if cache_dir is not None:
            data = load_cached(cache_dir, grid, a, n_funcs, metric)
            if data is not None:
                out.append(
                    OfflineConfigData(
                        a=data.a,
                        weight=float(w),
                        e_ref=data.e_ref,
                        m_a_offline=data.m_a_offline,
                        s_a_b=data.s_a_b,
                        m_e_offline=data.m_e_offline,
                        s_b=data.s_b,
                    )
                )
                continue
        data = build_offline_single(grid, a, w, n_funcs, metric)
        if cache_dir is not None:
            save_offline_entry(cache_dir, grid, data, metric)
        out.append(data)
    return out


# -- offline cache -----------------------------------------------------------

CACHE_SCHEMA = 1


def cache_key(grid: Grid, a: float, n_funcs: int, metric: str) -> str:
    """Content hash identifying one offline entry."""
    payload = json.dumps(
        {
            "schema": CACHE_SCHEMA,
            "x_max": grid.x_max,
            "n_points": grid.n_points,
            "a": float(a),
            "n_funcs": int(n_funcs),
            "metric": metric,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _cache_path(cache_dir: str, key: str) -> str:
    return os.path.join(cache_dir, f"offline_{key}.npz")


def save_offline_entry(
    cache_dir: str, grid: Grid, data: OfflineConfigData, metric: str
) -> str:
    """Atomically persist one offline entry; returns the file path."""
    os.makedirs(cache_dir, exist_ok=True)
    key = cache_key(grid, data.a, data.n_funcs, metric)
    meta = {
        "schema": CACHE_SCHEMA,
        "key": key,
        "x_max": grid.x_max,
        "n_points": grid.n_points,
        "a": data.a,
        "n_funcs": data.n_funcs,
        "metric": metric,
    }
    path = _cache_path(cache_dir, key)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".npz.tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            np.savez(
                fh,
                meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
                e_ref=np.float64(data.e_ref),
                m_a_offline=data.m_a_offline,
                s_a_b=data.s_a_b,
                m_e_offline=data.m_e_offline,
                s_b=data.s_b,
            )
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return path


def load_cached(
    cache_dir: str, grid: Grid, a: float, n_funcs: int, metric: str
) -> OfflineConfigData | None:
    """Load a cached offline entry, or None when absent."""
    path = _cache_path(cache_dir, cache_key(grid, a, n_funcs, metric))
    if not os.path.exists(path):
        return None
    with np.load(path) as npz:
        meta = json.loads(bytes(npz["meta"]).decode())
        if meta["schema"] != CACHE_SCHEMA:
            return None
        return OfflineConfigData(
            a=float(meta["a"]),
            weight=1.0,  # weights belong to the measure, not the cache
            e_ref=float(npz["e_ref"]),
            m_a_offline=npz["m_a_offline"],
            s_a_b=npz["s_a_b"],
            m_e_offline=npz["m_e_offline"],
            s_b=npz["s_b"],
        )
