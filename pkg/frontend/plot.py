#!/usr/bin/env python3
"""Render an eigenfunction CSV as a heatmap over the 2-simplex.

Reads the solver's eigenfunction CSV (columns x1,x2,x3,v plus a
"# base_index=..." comment) and writes a barycentric scatter plot
colored by v, with the base point marked.  A trajectory JSON (the
solver CLI's trajectory output) can be overlaid as a path ending at a
marked limit point.

Usage: plot.py eig.csv out.png [--trajectory traj.json]

Only three-dimensional data can be drawn; anything else exits with an
error.  The script reads the interchange files only and does not import
the solver package.
"""

import argparse
import json
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

SQRT3_2 = np.sqrt(3.0) / 2.0


def read_eigenfunction(path):
    """Parse the CSV into (points, values, base_index)."""
    base_index = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "base_index=" in line:
                    base_index = int(line.split("base_index=")[1])
                continue
            if line[0].isalpha():  # header
                continue
            rows.append([float(tok) for tok in line.split(",")])
    if base_index is None:
        raise ValueError(f"{path}: missing base_index comment")
    data = np.asarray(rows)
    return data[:, :-1], data[:, -1], base_index


def read_trajectory(path):
    with open(path) as fh:
        data = json.load(fh)
    states = np.asarray(data["states"], dtype=float)
    limit = data.get("limit_point")
    return states, None if limit is None else np.asarray(limit, dtype=float)


def to_plane(points):
    """Barycentric coordinates to plane coordinates (corners of a unit triangle)."""
    points = np.atleast_2d(points)
    # normalize so plain coordinates also work when <x, e*> != sum
    weights = points / points.sum(axis=1, keepdims=True)
    x = weights[:, 1] + 0.5 * weights[:, 2]
    y = SQRT3_2 * weights[:, 2]
    return np.column_stack([x, y])


def render(eig_csv, out_image, trajectory_json=None, point_size=6.0):
    """Write the heatmap image; returns a summary of what was drawn."""
    points, values, base_index = read_eigenfunction(eig_csv)
    if points.shape[1] != 3:
        raise ValueError(f"only ternary plots are supported, got dimension {points.shape[1]}")
    xy = to_plane(points)
    vmin, vmax = float(values.min()), float(values.max())

    fig, ax = plt.subplots(figsize=(7.5, 6.8))
    scatter = ax.scatter(
        xy[:, 0], xy[:, 1], c=values, s=point_size, cmap="viridis", vmin=vmin, vmax=vmax, linewidths=0
    )
    fig.colorbar(scatter, ax=ax, label="eigenfunction value")

    triangle = np.array([[0, 0], [1, 0], [0.5, SQRT3_2], [0, 0]])
    ax.plot(triangle[:, 0], triangle[:, 1], color="black", linewidth=0.8)
    for label, corner in (("x1", (-0.03, -0.03)), ("x2", (1.01, -0.03)), ("x3", (0.5, SQRT3_2 + 0.02))):
        ax.text(*corner, label, fontsize=10)

    base_xy = xy[base_index]
    ax.scatter([base_xy[0]], [base_xy[1]], marker="*", s=140, color="red", zorder=5, label="base point")

    n_traj = 0
    if trajectory_json is not None:
        states, limit = read_trajectory(trajectory_json)
        txy = to_plane(states)
        n_traj = len(txy)
        ax.plot(txy[:, 0], txy[:, 1], color="white", linewidth=1.6, zorder=4)
        ax.plot(txy[:, 0], txy[:, 1], color="crimson", linewidth=0.9, zorder=4, label="trajectory")
        if limit is not None:
            lxy = to_plane(limit)[0]
            ax.scatter([lxy[0]], [lxy[1]], marker="o", s=90, facecolors="none", edgecolors="crimson",
                       linewidths=1.6, zorder=6, label="limit point")

    ax.set_aspect("equal")
    ax.set_axis_off()
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_image, dpi=150)
    plt.close(fig)

    return {
        "points_plotted": int(len(points)),
        "vmin": vmin,
        "vmax": vmax,
        "color_limits": [float(c) for c in scatter.get_clim()],
        "base_index": base_index,
        "base_xy": [float(base_xy[0]), float(base_xy[1])],
        "trajectory_points": n_traj,
        "outfile": str(out_image),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("eig_csv")
    parser.add_argument("out_image")
    parser.add_argument("--trajectory", default=None)
    args = parser.parse_args(argv)
    try:
        summary = render(args.eig_csv, args.out_image, args.trajectory)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
