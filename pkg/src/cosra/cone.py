"""Invariant cone construction and membership tests.

When every product of p pair matrices is strictly positive, the convex
cone generated by the rows of all length-p products is invariant under
every single-step map x -> x M_ab: appending one more factor turns a
length-p product into the tail of a length-(p+1) product, whose rows
are nonnegative combinations of rows of another length-p product.  Its
section X by the simplex stays away from the boundary, which is what
makes covering arguments in the Hilbert metric possible.

The cone is kept in generator form; membership of a normalized point is
a small linear program (is the point within tol of the convex hull of
the normalized generators).  Converting to facet inequalities is out of
scope on purpose.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import DepthOverflow, InvalidParam
from .game import GameInstance, ValidationReport, validate_game

__all__ = ["InvariantCone", "build_invariant_cone", "cone_contains", "in_cone_mask", "cone_from_generators"]


@dataclass(frozen=True)
class InvariantCone:
    """Finitely generated cone certifying invariance of the dynamics.

    generators are normalized to <g, e*> = 1 and deduplicated; kappa[i]
    is the smallest i-th coordinate over generators, so every point of
    the section satisfies x_i >= kappa[i].
    """

    generators: np.ndarray  # (n, d), rows on the section
    depth: int
    kappa: np.ndarray
    kappa_min: float
    e_star: np.ndarray
    hull_vertices: np.ndarray  # reduced generator set spanning the same hull

    @property
    def barycenter(self) -> np.ndarray:
        return self.generators.mean(axis=0)

    def slab_contains(self, x, tol: float = 1e-9) -> bool:
        """Cheap relaxation: coordinatewise lower bounds only."""
        return bool(np.all(np.asarray(x, dtype=float) >= self.kappa - tol))


def _dedup_rows(rows: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Drop rows whose Hilbert distance to a kept row is below tol.

    Rows are normalized, so Hilbert-close means entrywise log-close;
    sorting makes near-duplicates adjacent.
    """
    order = np.lexsort(rows.T)
    rows = rows[order]
    logs = np.log(rows)
    keep = [0]
    for i in range(1, len(rows)):
        dl = logs[i] - logs[keep[-1]]
        if dl.max() - dl.min() > tol:  # Hilbert distance of normalized rows
            keep.append(i)
    return rows[keep]


def _hull_reduce(gens: np.ndarray) -> np.ndarray:
    """Keep only extreme points of the generator hull (same convex hull)."""
    if len(gens) <= gens.shape[1] + 1:
        return gens
    try:
        from scipy.spatial import ConvexHull

        chart = gens[:, :-1]  # affine chart of the section
        hull = ConvexHull(chart)
        return gens[np.sort(hull.vertices)]
    except Exception:
        return gens


def cone_from_generators(generators, e_star, depth: int = 0) -> InvariantCone:
    """Wrap a user-supplied generator list (normalizing onto the section)."""
    gens = np.asarray(generators, dtype=float)
    if gens.ndim != 2:
        raise InvalidParam("generators must be a list of vectors")
    if np.any(gens <= 0) or not np.all(np.isfinite(gens)):
        raise InvalidParam("generators must be strictly positive and finite")
    e = np.asarray(e_star, dtype=float)
    gens = gens / (gens @ e)[:, None]
    gens = _dedup_rows(gens)
    kappa = gens.min(axis=0)
    return InvariantCone(
        generators=gens,
        depth=depth,
        kappa=kappa,
        kappa_min=float(kappa.min()),
        e_star=e,
        hull_vertices=_hull_reduce(gens),
    )


def build_invariant_cone(
    game: GameInstance,
    report: ValidationReport | None = None,
    max_generators: int = 10**6,
) -> InvariantCone:
    """Generators = normalized rows of every product of depth-many pair matrices.

    The enumeration is lexicographic in the action-index sequence, so the
    generator list is deterministic.  Raises DepthOverflow when the
    enumeration would produce more than max_generators rows; a cone can
    then be supplied explicitly in the game description instead (it is
    checked for invariance before use).
    """
    if game.cone_generators is not None:
        K = cone_from_generators(game.cone_generators, game.e_star, depth=0)
        for g in K.generators:
            for M in game.pairs_flat:
                y = g @ M
                mass = float(y @ game.e_star)
                if mass <= 0 or not cone_contains(K, y / mass, tol=1e-9):
                    raise InvalidParam("supplied cone is not invariant under the game dynamics")
        return K
    if report is None:
        report = validate_game(game)
    report.raise_if_invalid()
    p = report.depth
    pairs = game.pairs_flat
    n_products = len(pairs) ** p
    if n_products * game.dim > max_generators:
        raise DepthOverflow(
            f"{n_products} products of depth {p} would yield {n_products * game.dim} generators "
            f"(cap {max_generators}); supply a cone explicitly"
        )
    rows = []
    for idx in itertools.product(range(len(pairs)), repeat=p):
        M = pairs[idx[0]]
        for k in idx[1:]:
            M = M @ pairs[k]
        rows.append(M)
    gens = np.concatenate(rows, axis=0)
    if np.any(gens <= 0):
        raise InvalidParam("a depth-p product is not strictly positive; validation should have caught this")
    gens = gens / (gens @ game.e_star)[:, None]
    gens = _dedup_rows(gens)
    kappa = gens.min(axis=0)
    return InvariantCone(
        generators=gens,
        depth=p,
        kappa=kappa,
        kappa_min=float(kappa.min()),
        e_star=game.e_star.copy(),
        hull_vertices=_hull_reduce(gens),
    )


def _membership_residual(K: InvariantCone, x: np.ndarray) -> float:
    """Smallest sup-norm deviation of x from the convex hull of the generators."""
    V = K.hull_vertices
    n, d = V.shape
    # variables: mu_1..mu_n, t; minimize t subject to |x - V^T mu| <= t, sum mu = 1
    c = np.zeros(n + 1)
    c[-1] = 1.0
    A_ub = np.zeros((2 * d, n + 1))
    A_ub[:d, :n] = V.T
    A_ub[:d, -1] = -1.0
    A_ub[d:, :n] = -V.T
    A_ub[d:, -1] = -1.0
    b_ub = np.concatenate([x, -x])
    A_eq = np.zeros((1, n + 1))
    A_eq[0, :n] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], method="highs")
    if not res.success:
        return np.inf
    return float(res.fun)


def cone_contains(K: InvariantCone, x, tol: float = 1e-9) -> bool:
    """True iff the normalized point x is within tol of the generator hull."""
    x = np.asarray(x, dtype=float)
    if abs(float(x @ K.e_star) - 1.0) > 1e-9:
        raise InvalidParam("point must be normalized to <x, e*> = 1")
    if not K.slab_contains(x, tol):
        return False
    return _membership_residual(K, x) <= tol


def in_cone_mask(K: InvariantCone, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Vector form of cone_contains with the slab test as a cheap pre-reject."""
    pts = np.asarray(points, dtype=float)
    mask = np.zeros(len(pts), dtype=bool)
    slab = np.all(pts >= K.kappa[None, :] - tol, axis=1)
    for i in np.where(slab)[0]:
        mask[i] = _membership_residual(K, pts[i]) <= tol
    return mask
