"""Hot numeric kernels, with a numba fast path and a numpy fallback.

Directed distances are computed from log-encoded points.  Zeros in the
first argument of a directed distance are encoded as -inf (the
coordinate imposes no constraint); zeros in the second argument are
encoded as the large finite NEG so that the difference becomes a large
positive sentinel standing in for an infinite distance.  Values at or
above INF_THRESHOLD are treated as infinite by every consumer.

Both paths compute identical float64 operations (subtract, compare), so
results are bitwise identical whichever is active.
"""

from __future__ import annotations

import os

import numpy as np

NEG = -1e18  # log encoding of a zero in the second argument slot
INF_THRESHOLD = 1e16  # distances at or above this are infinite

try:  # pragma: no cover - exercised implicitly
    import numba

    if os.environ.get("COSRA_THREADS"):
        numba.set_num_threads(max(1, int(os.environ["COSRA_THREADS"])))
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def log_first(x: np.ndarray) -> np.ndarray:
    """Log encoding for the first slot of a directed distance (-inf at zeros)."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, -np.inf)
    pos = x > 0
    out[pos] = np.log(x[pos])
    return out


def log_second(x: np.ndarray) -> np.ndarray:
    """Log encoding for the second slot of a directed distance (NEG at zeros)."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, NEG)
    pos = x > 0
    out[pos] = np.log(x[pos])
    return out


def funk_rows(lx_first: np.ndarray, logY_second: np.ndarray) -> np.ndarray:
    """Directed distances from one encoded point to every encoded grid point."""
    return (lx_first[None, :] - logY_second).max(axis=1)


def _eval_numpy(v, log_images, gauges, logY_second, chunk=256):
    N, P, d = log_images.shape
    out = np.empty((N, P))
    vb = v[None, :]
    for s in range(0, N, chunk):
        e = min(N, s + chunk)
        for p in range(P):
            acc = log_images[s:e, p, 0][:, None] - logY_second[None, :, 0]
            for c in range(1, d):
                np.maximum(acc, log_images[s:e, p, c][:, None] - logY_second[None, :, c], out=acc)
            out[s:e, p] = (acc + vb).min(axis=1)
    return out + gauges


def _stats_numpy(log_images, gauges, logY_second, in_cone, chunk=256):
    N, P, d = log_images.shape
    finite_any = np.zeros((N, P), dtype=bool)
    m_plus, m_minus = -np.inf, np.inf
    cone_idx = np.where(in_cone)[0]
    for s in range(0, N, chunk):
        e = min(N, s + chunk)
        for p in range(P):
            acc = log_images[s:e, p, 0][:, None] - logY_second[None, :, 0]
            for c in range(1, d):
                np.maximum(acc, log_images[s:e, p, c][:, None] - logY_second[None, :, c], out=acc)
            finite_any[s:e, p] = (acc < INF_THRESHOLD).any(axis=1)
            block_cone = in_cone[s:e]
            if block_cone.any() and cone_idx.size:
                sub = acc[block_cone][:, cone_idx] + gauges[s:e, p][block_cone, None]
                sub = sub[sub < INF_THRESHOLD]
                if sub.size:
                    m_plus = max(m_plus, float(sub.max()))
                    m_minus = min(m_minus, float(sub.min()))
    return finite_any, m_minus, m_plus


if HAVE_NUMBA:

    @numba.njit(parallel=True, cache=True)
    def _eval_numba(v, log_images, gauges, logY_second):  # pragma: no cover - jitted
        N, P, d = log_images.shape
        out = np.empty((N, P))
        for i in numba.prange(N):
            for p in range(P):
                best = np.inf
                for j in range(N):
                    row = -np.inf
                    for c in range(d):
                        t = log_images[i, p, c] - logY_second[j, c]
                        if t > row:
                            row = t
                    val = v[j] + row
                    if val < best:
                        best = val
                out[i, p] = gauges[i, p] + best
        return out

    @numba.njit(parallel=True, cache=True)
    def _stats_numba(log_images, gauges, logY_second, in_cone):  # pragma: no cover - jitted
        N, P, d = log_images.shape
        finite_any = np.zeros((N, P), dtype=numba.boolean)
        plus = np.full(N, -np.inf)
        minus = np.full(N, np.inf)
        for i in numba.prange(N):
            for p in range(P):
                g = gauges[i, p]
                for j in range(N):
                    row = -np.inf
                    for c in range(d):
                        t = log_images[i, p, c] - logY_second[j, c]
                        if t > row:
                            row = t
                    if row < INF_THRESHOLD:
                        finite_any[i, p] = True
                        if in_cone[i] and in_cone[j]:
                            val = g + row
                            if val > plus[i]:
                                plus[i] = val
                            if val < minus[i]:
                                minus[i] = val
        return finite_any, minus.min(), plus.max()


def eval_tables(v, log_images, gauges, logY_second) -> np.ndarray:
    """Per grid point and action pair: gauge + min_j [v_j + Funk(image, y_j)]."""
    v = np.ascontiguousarray(v, dtype=float)
    if HAVE_NUMBA:
        return _eval_numba(v, log_images, gauges, logY_second)
    return _eval_numpy(v, log_images, gauges, logY_second)


def tableau_stats(log_images, gauges, logY_second, in_cone):
    """One sweep: per-(i, p) finite-row flags plus in-cone distance extremes."""
    if HAVE_NUMBA:
        finite_any, m_minus, m_plus = _stats_numba(
            log_images, gauges, logY_second, np.ascontiguousarray(in_cone)
        )
        return np.asarray(finite_any, dtype=bool), float(m_minus), float(m_plus)
    return _stats_numpy(log_images, gauges, logY_second, in_cone)
