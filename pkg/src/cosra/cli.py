"""Command line interface.

Subcommands: solve, certify, trajectory, distance, perturb, bench.
Exit codes: 0 on success, 2 on input or validation failure, 3 on solver
failure.  Identical inputs produce byte-identical output files except
for wall-time fields.  The COSRA_THREADS environment variable caps
worker threads (default: machine parallelism).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import errors
from .cone import build_invariant_cone
from .continuity import lipschitz_experiment
from .game import leslie_benchmark, load_game, validate_game
from .grid import generate_grid, grid_point_count, resolution_for_points
from .metrics import hausdorff_thompson
from .shapley import ValueFunction, build_tableau
from .solver import (
    certify_subeigenvector,
    read_eigenfunction_csv,
    result_to_dict,
    rvi_km_solve,
    write_eigenfunction_csv,
    write_result_json,
)
from .strategies import action_string, simulate

VALIDATION_ERRORS = (errors.InvalidParam, errors.DifferentParts, errors.NotPrimitive, errors.NotLipschitz)
SOLVER_ERRORS = (
    errors.ResolutionTooCoarse,
    errors.DepthOverflow,
    errors.DegenerateImage,
    errors.NoFiniteDistance,
    errors.IterationCap,
)

BENCH_RESOLUTIONS = (80, 100, 130, 160)
BENCH_STOP = 0.01  # reproduces the reported iteration regime of the reference table


def _apply_thread_cap():
    cap = os.environ.get("COSRA_THREADS")
    if not cap:
        return
    n = max(1, int(cap))
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(n))
    try:
        import numba

        numba.set_num_threads(n)
    except ImportError:
        pass


def _pipeline(game, resolution):
    report = validate_game(game)
    report.raise_if_invalid()
    cone = build_invariant_cone(game, report)
    grid = generate_grid(game, cone, resolution)
    tableau = build_tableau(game, grid)
    return grid, tableau


def _resolution_from_args(args, dim) -> int:
    if getattr(args, "points", None):
        return resolution_for_points(args.points, dim)
    return args.resolution


def cmd_solve(args) -> int:
    game = load_game(args.game)
    m = _resolution_from_args(args, game.dim)
    grid, tableau = _pipeline(game, m)
    result = rvi_km_solve(game, grid, tableau, stop=args.stop)
    payload = result_to_dict(result)
    print(json.dumps(payload, indent=2))
    if args.out:
        write_result_json(result, args.out)
    if args.eigenfunction:
        write_eigenfunction_csv(result, grid, args.eigenfunction)
    return 0


def cmd_certify(args) -> int:
    game = load_game(args.game)
    points, values, base_index = read_eigenfunction_csv(args.values)
    if points.shape[1] != game.dim:
        raise errors.InvalidParam("value CSV dimension does not match the game")
    m = resolution_for_points(len(points), game.dim)
    if grid_point_count(m, game.dim) != len(points):
        raise errors.InvalidParam("value CSV row count does not match any lattice size")
    grid, tableau = _pipeline(game, m)
    if np.abs(points - grid.points).max() > 1e-9:
        raise errors.InvalidParam("value CSV points do not match the lattice of this game")
    vf = ValueFunction(values=values, base_index=base_index)
    cert = certify_subeigenvector(grid, tableau, vf, args.lam, tol=args.tol)
    out = {
        "lambda": cert.lambda_,
        "sub_margin": cert.sub_margin,
        "super_margin": cert.super_margin,
        "upper_certified": cert.upper_certified,
        "lower_certified": cert.lower_certified,
        "upper_bound": cert.upper_bound,
        "lower_bound": cert.lower_bound,
        "h": grid.h_cert,
        "tol": cert.tol,
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_trajectory(args) -> int:
    game = load_game(args.game)
    m = _resolution_from_args(args, game.dim)
    grid, tableau = _pipeline(game, m)
    result = rvi_km_solve(game, grid, tableau, stop=args.stop)
    x0 = np.array([float(tok) for tok in args.start.split(",")])
    traj = simulate(result.value, game, grid, tableau, x0, args.steps)
    if game.kind == "leslie":
        actions = [game.a_labels[a] + game.b_labels[b] for a, b in traj.actions]
    else:
        actions = [[a, b] for a, b in traj.actions]
    payload = {
        "states": [list(map(float, s)) for s in traj.states],
        "actions": actions,
        "action_indices": [[a, b] for a, b in traj.actions],
        "move_string": action_string(game, traj.actions),
        "gauges": [float(g) for g in traj.gauges],
        "cumulative": [float(c) for c in traj.cumulative],
        "cycle": list(traj.cycle) if traj.cycle else None,
        "limit_point": None if traj.limit_point is None else [float(c) for c in traj.limit_point],
        "mean_payoff": traj.mean_payoff,
    }
    text = json.dumps(payload, indent=2, ensure_ascii=False)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


def cmd_distance(args) -> int:
    g1 = load_game(args.game_a)
    g2 = load_game(args.game_b)
    out = {}
    if g1.set_min is not None and g2.set_min is not None:
        out["min_sets"] = hausdorff_thompson(g1.set_min, g2.set_min)
        out["max_sets"] = hausdorff_thompson(g1.set_max, g2.set_max)
    out["pair_sets"] = hausdorff_thompson(g1.pairs_flat, g2.pairs_flat)
    print(json.dumps(out, indent=2))
    return 0


def cmd_perturb(args) -> int:
    game = load_game(args.game)
    report = lipschitz_experiment(
        game,
        epsilon=args.epsilon,
        trials=args.trials,
        m=args.resolution,
        stop=args.stop,
        seed=args.seed,
    )
    payload = report.to_dict()
    payload["seed"] = args.seed
    print(json.dumps(payload, indent=2))
    return 0


def cmd_bench(args) -> int:
    game = load_game(args.game) if args.game else leslie_benchmark()
    resolutions = [int(tok) for tok in args.resolutions.split(",")]
    print(f"{'points':>8}  {'value':>8}  {'iterations':>10}  {'runtime_s':>10}")
    for m in resolutions:
        t0 = time.perf_counter()
        grid, tableau = _pipeline(game, m)
        result = rvi_km_solve(game, grid, tableau, stop=args.stop)
        elapsed = time.perf_counter() - t0
        print(f"{grid.n_points:>8}  {result.growth_factor:>8.4f}  {result.iterations:>10}  {elapsed:>10.2f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cosra", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a game and report the certified interval")
    p.add_argument("game")
    p.add_argument("--resolution", type=int, default=80)
    p.add_argument("--points", type=int, help="pick the smallest lattice with at least this many points")
    p.add_argument("--stop", type=float, default=None)
    p.add_argument("--out", help="write the result JSON here")
    p.add_argument("--eigenfunction", help="write the eigenfunction CSV here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="check sub/super eigenvector certificates for given values")
    p.add_argument("game")
    p.add_argument("values", help="eigenfunction CSV")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("trajectory", help="simulate greedy play from a start point")
    p.add_argument("game")
    p.add_argument("--start", required=True, help="comma-separated coordinates")
    p.add_argument("--steps", type=int, default=30)
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--points", type=int)
    p.add_argument("--stop", type=float, default=1e-3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("distance", help="Hausdorff-Thompson distances between two games")
    p.add_argument("game_a")
    p.add_argument("game_b")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("perturb", help="Lipschitz-continuity experiment")
    p.add_argument("game")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=int, default=30)
    p.add_argument("--stop", type=float, default=0.01)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("bench", help="reproduce the population-game benchmark table")
    p.add_argument("game", nargs="?", default=None)
    p.add_argument("--resolutions", default=",".join(str(m) for m in BENCH_RESOLUTIONS))
    p.add_argument("--stop", type=float, default=BENCH_STOP)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses code 2 for usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
