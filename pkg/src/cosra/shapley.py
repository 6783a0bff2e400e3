"""The discretized dynamic-programming operator and its interpolations.

One application of the operator at a grid point x is

    min over a, max over b of  [ log<x M_ab, e*> + (I+ v)(image) ]

where image is the normalized successor and I+ is the upper Lipschitz
interpolation ``(I+ v)(x) = min_j [v_j + Funk(x, y_j)]`` from grid
values.  The operator is monotone and commutes with adding constants,
hence nonexpansive in the Hilbert seminorm ``max v - min v``.

A tableau precomputes everything that does not change between
iterations: gauges, normalized images and their log encodings, and (for
small grids) the full matrix of directed distances from every image to
every grid point.  Above the cache budget the distance rows are
recomputed on the fly, which costs the same O(|A||B| N^2) arithmetic per
iteration but no quadratic memory; both modes produce bitwise identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import INF_THRESHOLD, eval_tables as _eval_tables_kernel, funk_rows, log_first, log_second
from .errors import DegenerateImage, InvalidParam, NoFiniteDistance, NotLipschitz
from .game import GameInstance
from .grid import Grid

__all__ = [
    "ImageTableau",
    "ValueFunction",
    "build_tableau",
    "step_gauge_image",
    "interp_plus",
    "interp_minus",
    "eval_F_hat",
    "eval_action_tables",
    "bounds_M",
    "check_grid_lipschitz",
    "grid_funk_matrix",
    "DEFAULT_CACHE_ENTRIES",
]

DEFAULT_CACHE_ENTRIES = 2 * 10**7  # full distance tableau is cached below this many entries


def step_gauge_image(x, M, e_star):
    """One dynamic step from the section: additive gauge and normalized image."""
    x = np.asarray(x, dtype=float)
    y = x @ np.asarray(M, dtype=float)
    s = float(y @ np.asarray(e_star, dtype=float))
    if s <= 0 or not np.isfinite(s):
        raise DegenerateImage("state was mapped to the zero vector")
    return float(np.log(s)), y / s


@dataclass(frozen=True)
class ValueFunction:
    """Grid values normalized to zero at the base point."""

    values: np.ndarray
    base_index: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)

    @property
    def hilbert_seminorm(self) -> float:
        return float(self.values.max() - self.values.min())


@dataclass(frozen=True)
class ImageTableau:
    """Per (grid point, action pair) data reused across iterations."""

    game: GameInstance
    grid: Grid
    gauges: np.ndarray  # (N, P)
    images: np.ndarray  # (N, P, d)
    log_images: np.ndarray  # (N, P, d), first-slot encoding
    logY_first: np.ndarray  # (N, d)
    logY_second: np.ndarray  # (N, d)
    rows: np.ndarray | None  # (P, N, N) cached directed distances, or None
    m_minus: float
    m_plus: float

    @property
    def n_pairs(self) -> int:
        return self.gauges.shape[1]


def build_tableau(game: GameInstance, grid: Grid, cache_entries: int = DEFAULT_CACHE_ENTRIES) -> ImageTableau:
    """Precompute gauges, images, log encodings and distance bounds.

    Raises DegenerateImage if any grid point is mapped to zero and
    NoFiniteDistance if some image is comparable to no grid point at
    all; validated games never trigger either.
    """
    X = grid.points
    pairs = game.pairs_flat
    N, d = X.shape
    P = pairs.shape[0]
    raw = np.einsum("nd,pde->npe", X, pairs)
    mass = raw @ game.e_star
    if np.any(mass <= 0) or not np.all(np.isfinite(mass)):
        raise DegenerateImage("some grid point is mapped to the zero vector")
    gauges = np.log(mass)
    images = raw / mass[..., None]
    drift = np.abs(images @ game.e_star - 1.0).max()
    if drift > 1e-12:
        raise InvalidParam(f"normalized image left the section by {drift:.2e}")
    log_images = np.ascontiguousarray(log_first(images))
    logY_first = np.ascontiguousarray(log_first(X))
    logY_second = np.ascontiguousarray(log_second(X))
    gauges = np.ascontiguousarray(gauges)
    finite_any, m_minus, m_plus = _kernels.tableau_stats(log_images, gauges, logY_second, grid.in_cone)
    if not finite_any.all():
        i, p = np.argwhere(~finite_any)[0]
        raise NoFiniteDistance(f"image of grid point {i} under pair {p} is comparable to no grid point")
    rows = None
    if P * N * N <= cache_entries:
        rows = np.empty((P, N, N))
        for p in range(P):
            for i in range(N):
                rows[p, i] = funk_rows(log_images[i, p], logY_second)
    return ImageTableau(
        game=game,
        grid=grid,
        gauges=gauges,
        images=images,
        log_images=log_images,
        logY_first=logY_first,
        logY_second=logY_second,
        rows=rows,
        m_minus=m_minus,
        m_plus=m_plus,
    )


def _eval_pair_table(v: np.ndarray, tableau: ImageTableau) -> np.ndarray:
    if tableau.rows is not None:
        P, N, _ = tableau.rows.shape
        out = np.empty((N, P))
        for p in range(P):
            out[:, p] = (tableau.rows[p] + v[None, :]).min(axis=1)
        return out + tableau.gauges
    return _eval_tables_kernel(v, tableau.log_images, tableau.gauges, tableau.logY_second)


def eval_action_tables(v, tableau: ImageTableau) -> np.ndarray:
    """Values per (grid point, a, b) before the min-max reduction."""
    v = np.asarray(v.values if isinstance(v, ValueFunction) else v, dtype=float)
    W = _eval_pair_table(v, tableau)
    if W.min() >= INF_THRESHOLD:
        raise NoFiniteDistance("an action value is infinite; grid and game are inconsistent")
    N = W.shape[0]
    return W.reshape(N, tableau.game.n_min, tableau.game.n_max)


def eval_F_hat(v, tableau: ImageTableau) -> np.ndarray:
    """One application of the discretized operator to grid values.

    Ties in the inner extrema are immaterial for the value; argmin and
    argmax consumers resolve ties toward the lowest action index.
    """
    T = eval_action_tables(v, tableau)
    return T.max(axis=2).min(axis=1)


def bounds_M(tableau: ImageTableau) -> tuple:
    """Extremes of the one-step directed distances over the in-cone grid.

    M+ (resp. M-) is the largest (smallest) finite value of
    Funk(x M_ab, y) over in-cone grid points x, y and action pairs.
    """
    return tableau.m_minus, tableau.m_plus


def _point_log_encodings(x) -> tuple:
    x = np.asarray(x, dtype=float)
    return log_first(x), log_second(x)


def interp_plus(v, x, tableau: ImageTableau) -> float:
    """Upper Lipschitz extension min_j [v_j + Funk(x, y_j)] at an arbitrary point."""
    values = np.asarray(v.values if isinstance(v, ValueFunction) else v, dtype=float)
    lx_first, _ = _point_log_encodings(x)
    rows = funk_rows(lx_first, tableau.logY_second)
    out = float(np.min(values + rows))
    if out >= INF_THRESHOLD:
        raise NoFiniteDistance("point is comparable to no grid point")
    return out


def interp_minus(v, x, tableau: ImageTableau) -> float:
    """Lower Lipschitz extension max_j [v_j - Funk(y_j, x)]; never above interp_plus."""
    values = np.asarray(v.values if isinstance(v, ValueFunction) else v, dtype=float)
    _, lx_second = _point_log_encodings(x)
    rows = (tableau.logY_first - lx_second[None, :]).max(axis=1)
    usable = rows < INF_THRESHOLD
    if not usable.any():
        raise NoFiniteDistance("point is comparable to no grid point")
    return float(np.max(values[usable] - rows[usable]))


def grid_funk_matrix(grid: Grid, chunk: int = 512) -> np.ndarray:
    """All pairwise directed distances between grid points (INF sentinel kept)."""
    lf = log_first(grid.points)
    ls = log_second(grid.points)
    N, d = lf.shape
    out = np.empty((N, N))
    for s in range(0, N, chunk):
        e = min(N, s + chunk)
        acc = lf[s:e, None, 0] - ls[None, :, 0]
        for c in range(1, d):
            np.maximum(acc, lf[s:e, None, c] - ls[None, :, c], out=acc)
        out[s:e] = acc
    return out


def check_grid_lipschitz(v, grid: Grid, tol: float = 1e-9, raise_on_fail: bool = True) -> float:
    """Largest violation of v_i - v_j <= Funk(y_i, y_j) over grid pairs.

    Returns the violation (<= tol means the function is grid-Lipschitz);
    raises NotLipschitz above tol unless raise_on_fail is False.
    Streams over row blocks so large grids never materialize the full
    distance matrix.
    """
    values = np.asarray(v.values if isinstance(v, ValueFunction) else v, dtype=float)
    lf = log_first(grid.points)
    ls = log_second(grid.points)
    N, d = lf.shape
    worst = -np.inf
    chunk = max(1, min(N, 2 * 10**7 // max(N, 1)))
    for s in range(0, N, chunk):
        e = min(N, s + chunk)
        F = lf[s:e, None, 0] - ls[None, :, 0]
        for c in range(1, d):
            np.maximum(F, lf[s:e, None, c] - ls[None, :, c], out=F)
        gap = values[s:e, None] - values[None, :] - F
        gap[F >= INF_THRESHOLD] = -np.inf
        worst = max(worst, float(gap.max()))
    if raise_on_fail and worst > tol:
        raise NotLipschitz(f"value function violates the grid Lipschitz property by {worst:.3e}")
    return worst
