"""Relative value iteration with Krasnoselskii-Mann damping.

The additive eigenvalue of the discretized operator is found by the
averaged fixed-point scheme

    v_{k+1} = (Fn(v_k) + v_k) / 2,      Fn(v) = F(v) - [F(v)](base)

starting from v_0 = 0 and stopping once the Hilbert seminorm of the
increment drops to the requested threshold.  Averaging with the
identity forces convergence for nonexpansive maps; the increment decays
at least like 1/sqrt(k), which yields an a-priori iteration cap from
the extreme one-step distances (M-, M+).  On termination the eigenvalue
estimate lambda pins the game value inside

    [lambda - 3 h', lambda + 2 h'],   h' = max(stop, covering radius):

the residual bracket costs 2 stop on each side and the discretization
one more h below.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParam, IterationCap
from .game import GameInstance, validate_game
from .grid import Grid
from .shapley import ImageTableau, ValueFunction, check_grid_lipschitz, eval_F_hat

__all__ = [
    "SolveResult",
    "CertResult",
    "rvi_km_solve",
    "value_iteration_oracle",
    "certify_subeigenvector",
    "iteration_cap",
    "result_to_dict",
    "write_result_json",
    "write_eigenfunction_csv",
    "read_eigenfunction_csv",
]


@dataclass(frozen=True)
class SolveResult:
    """Converged eigenvalue estimate with its certified interval."""

    lambda_: float
    interval: tuple
    iterations: int
    residual_sup: float
    residual_inf: float
    h_used: float
    grid_points: int
    wall_time: float
    stop: float
    m_minus: float
    m_plus: float
    value: ValueFunction
    diffs: tuple  # Hilbert seminorms of successive increments

    @property
    def growth_factor(self) -> float:
        """The eigenvalue exponentiated: the competitive spectral radius itself."""
        return float(np.exp(self.lambda_))


def iteration_cap(m_minus: float, m_plus: float, stop: float) -> int:
    """Theoretical bound (4/pi) ((M+ - M-) / stop)^2 on the iteration count."""
    spread = m_plus - m_minus
    if spread <= 0:
        return 1
    return math.ceil((4.0 / math.pi) * (spread / stop) ** 2)


def rvi_km_solve(
    game: GameInstance,
    grid: Grid,
    tableau: ImageTableau,
    stop: float | None = None,
    v0=None,
    cap_margin: int = 16,
) -> SolveResult:
    """Run the damped relative value iteration until the increment is small.

    stop defaults to the grid's certified covering radius, balancing the
    iteration and discretization errors.  v0 defaults to zero; a custom
    start is normalized to vanish at the base point.  Exceeding the
    theoretical iteration cap (plus a margin) raises IterationCap, since
    that would contradict the a-priori termination bound.
    """
    validate_game(game).raise_if_invalid()
    if stop is None:
        stop = grid.h_cert
    if stop <= 0:
        raise InvalidParam("stop threshold must be positive")
    base = grid.base_index
    N = grid.n_points
    if v0 is None:
        v = np.zeros(N)
    else:
        v = np.asarray(v0, dtype=float).copy()
        if v.shape != (N,):
            raise InvalidParam("v0 must have one value per grid point")
        v -= v[base]
    cap = iteration_cap(tableau.m_minus, tableau.m_plus, stop) + cap_margin
    t0 = time.perf_counter()
    diffs = []
    lam = 0.0
    while True:
        F = eval_F_hat(v, tableau)
        lam = float(F[base])
        v_next = 0.5 * (F - lam + v)
        delta = v_next - v
        diff = float(delta.max() - delta.min())
        diffs.append(diff)
        if diff <= stop:
            residual = F - lam - v
            break
        v = v_next
        if len(diffs) > cap:
            raise IterationCap(
                f"no convergence within the termination bound ({cap} iterations); this is a bug"
            )
    h_used = max(stop, grid.h_cert)
    return SolveResult(
        lambda_=lam,
        interval=(lam - 3.0 * h_used, lam + 2.0 * h_used),
        iterations=len(diffs),
        residual_sup=float(residual.max()),
        residual_inf=float(residual.min()),
        h_used=float(h_used),
        grid_points=N,
        wall_time=time.perf_counter() - t0,
        stop=float(stop),
        m_minus=tableau.m_minus,
        m_plus=tableau.m_plus,
        value=ValueFunction(values=v, base_index=base),
        diffs=tuple(diffs),
    )


def value_iteration_oracle(game: GameInstance, grid: Grid, tableau: ImageTableau, k_max: int) -> float:
    """Undamped growth-rate estimate (w_k(base) - w_{k - window}(base)) / window.

    Used only to cross-check the damped solver through an independent
    route; the window is half the horizon.
    """
    if k_max < 10:
        raise InvalidParam("k_max must be at least 10")
    window = k_max // 2
    base = grid.base_index
    w = np.zeros(grid.n_points)
    w_mid = 0.0
    for k in range(1, k_max + 1):
        w = eval_F_hat(w, tableau)
        if k == k_max - window:
            w_mid = float(w[base])
    return (float(w[base]) - w_mid) / window


@dataclass(frozen=True)
class CertResult:
    """Sub/super eigenvector margins and the bounds they certify."""

    lambda_: float
    sub_margin: float  # max of F v - lambda - v
    super_margin: float  # min of F v - lambda - v
    upper_certified: bool
    lower_certified: bool
    upper_bound: float  # rho <= this when upper_certified
    lower_bound: float  # rho >= this when lower_certified
    tol: float


def certify_subeigenvector(
    grid: Grid,
    tableau: ImageTableau,
    v: ValueFunction,
    lambda_: float,
    tol: float = 1e-9,
    lip_tol: float = 1e-9,
) -> CertResult:
    """Check the residual of (v, lambda) and certify value bounds.

    v must be grid-Lipschitz (checked; NotLipschitz otherwise).  If the
    residual stays below tol the upper bound rho <= lambda + tol holds;
    if it stays above -tol the lower bound rho >= lambda - h - tol holds,
    h being the certified covering radius.
    """
    check_grid_lipschitz(v, grid, tol=lip_tol)
    r = eval_F_hat(v, tableau) - lambda_ - np.asarray(v.values, dtype=float)
    sub = float(r.max())
    sup = float(r.min())
    return CertResult(
        lambda_=float(lambda_),
        sub_margin=sub,
        super_margin=sup,
        upper_certified=sub <= tol,
        lower_certified=sup >= -tol,
        upper_bound=float(lambda_) + tol,
        lower_bound=float(lambda_) - grid.h_cert - tol,
        tol=tol,
    )


def result_to_dict(res: SolveResult) -> dict:
    return {
        "lambda": res.lambda_,
        "interval": [res.interval[0], res.interval[1]],
        "iterations": res.iterations,
        "h": res.h_used,
        "grid_points": res.grid_points,
        "residual": [res.residual_inf, res.residual_sup],
        "wall_time_s": res.wall_time,
    }


def write_result_json(res: SolveResult, path) -> None:
    with open(Path(path), "w") as fh:
        json.dump(result_to_dict(res), fh, indent=2)
        fh.write("\n")


def write_eigenfunction_csv(res: SolveResult, grid: Grid, path) -> None:
    """Grid coordinates and values, 12 significant digits, base point flagged."""
    d = grid.dim
    with open(Path(path), "w") as fh:
        fh.write(f"# base_index={res.value.base_index}\n")
        fh.write(",".join(f"x{i + 1}" for i in range(d)) + ",v\n")
        for point, val in zip(grid.points, res.value.values):
            coords = ",".join(f"{c:.12g}" for c in point)
            fh.write(f"{coords},{val:.12g}\n")


def read_eigenfunction_csv(path):
    """Inverse of write_eigenfunction_csv: (points, values, base_index)."""
    base_index = None
    rows = []
    with open(Path(path)) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "base_index=" in line:
                    base_index = int(line.split("base_index=")[1])
                continue
            if line.startswith("x1"):
                continue
            rows.append([float(tok) for tok in line.split(",")])
    if base_index is None:
        raise InvalidParam("eigenfunction CSV lacks the base_index comment")
    data = np.asarray(rows, dtype=float)
    return data[:, :-1], data[:, -1], base_index
