"""Game instances: action sets, pair dynamics, validation, JSON ingestion.

A game is a pair of finite action sets together with the family of
nonnegative matrices M_ab that drive the alternating dynamics
``x -> x M_ab`` (row vectors act on the left).  Two schemas produce the
pair family:

* matrix games: action sets are matrix sets and M_ab = A B;
* survival/fertility games: the minimizer picks a survival vector
  ``alpha``, the maximizer a fertility vector ``beta``, and
  M_ab = ``build_leslie(alpha, beta)``.

Internally everything is reduced to the per-pair family, which is the
only thing the dynamics ever uses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DifferentParts, InvalidParam, NotPrimitive
from .metrics import MatrixSet, SupportPattern

__all__ = [
    "GameInstance",
    "ValidationReport",
    "build_leslie",
    "positivity_depth",
    "validate_game",
    "game_from_matrices",
    "game_from_leslie",
    "game_from_pairs",
    "game_from_dict",
    "load_game",
    "leslie_benchmark",
    "LESLIE_ALPHAS",
    "LESLIE_BETAS",
]

# Benchmark action sets for the three-age population game.
LESLIE_ALPHAS = ((0.9, 0.6), (0.6, 0.9), (0.7, 0.7))
LESLIE_BETAS = ((0.2, 1.4, 1.4), (0.2, 1.7, 1.0), (0.2, 1.0, 1.7))


def build_leslie(alpha, beta) -> np.ndarray:
    """Transposed Leslie matrix [[b1, a1, 0], [b2, 0, a2], [b3, 0, 0]].

    Survival rates must lie in (0, 1), fertility rates must be positive.
    """
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    if a.shape != (2,) or b.shape != (3,):
        raise InvalidParam("expected 2 survival rates and 3 fertility rates")
    if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
        raise InvalidParam("non-finite rate")
    if np.any(a <= 0) or np.any(a >= 1):
        raise InvalidParam("survival rates must lie strictly between 0 and 1")
    if np.any(b <= 0):
        raise InvalidParam("fertility rates must be positive")
    return np.array([
        [b[0], a[0], 0.0],
        [b[1], 0.0, a[1]],
        [b[2], 0.0, 0.0],
    ])


def positivity_depth(pattern) -> int:
    """Smallest p >= 1 such that the p-th boolean power of the mask is all true.

    Capped at Wielandt's primitivity bound (d-1)^2 + 1; raises NotPrimitive
    beyond it, since a primitive pattern must have stabilised by then.
    """
    mask = pattern.mask if isinstance(pattern, SupportPattern) else np.asarray(pattern, dtype=bool)
    d = mask.shape[0]
    cap = (d - 1) ** 2 + 1
    power = mask.copy()
    for p in range(1, cap + 1):
        if power.all():
            return p
        power = (power.astype(np.int64) @ mask.astype(np.int64)) > 0
    raise NotPrimitive(f"support pattern is not primitive (no positive power up to {cap})")


@dataclass(frozen=True)
class GameInstance:
    """Immutable description of one game.

    pair_matrices has shape (na, nb, d, d); entry (a, b) is the matrix
    applied when the minimizer plays a and the maximizer plays b.
    """

    dim: int
    e_star: np.ndarray
    pair_matrices: np.ndarray
    a_labels: tuple
    b_labels: tuple
    kind: str = "pairs"
    set_min: MatrixSet | None = None
    set_max: MatrixSet | None = None
    a_actions: tuple = ()
    b_actions: tuple = ()
    cone_generators: np.ndarray | None = None

    def __post_init__(self):
        e = np.asarray(self.e_star, dtype=float)
        if e.shape != (self.dim,) or np.any(e <= 0) or not np.all(np.isfinite(e)):
            raise InvalidParam("e_star must be a strictly positive vector of length dim")
        pm = np.asarray(self.pair_matrices, dtype=float)
        if pm.ndim != 4 or pm.shape[2:] != (self.dim, self.dim):
            raise InvalidParam("pair_matrices must have shape (na, nb, d, d)")
        object.__setattr__(self, "e_star", e)
        object.__setattr__(self, "pair_matrices", pm)

    @property
    def n_min(self) -> int:
        return self.pair_matrices.shape[0]

    @property
    def n_max(self) -> int:
        return self.pair_matrices.shape[1]

    @property
    def pairs_flat(self) -> np.ndarray:
        """Pair matrices flattened to (na*nb, d, d), minimizer index major."""
        na, nb, d, _ = self.pair_matrices.shape
        return self.pair_matrices.reshape(na * nb, d, d)

    def pair(self, a: int, b: int) -> np.ndarray:
        return self.pair_matrices[a, b]

    def normalize(self, x) -> np.ndarray:
        """Scale a nonzero nonnegative vector onto the section <x, e*> = 1."""
        x = np.asarray(x, dtype=float)
        s = float(x @ self.e_star)
        if s <= 0:
            raise InvalidParam("cannot normalize a vector with nonpositive mass")
        return x / s


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_game; the solver refuses instances with ok=False."""

    ok: bool
    problems: tuple
    depth: int | None = None
    support: SupportPattern | None = None

    def raise_if_invalid(self):
        if not self.ok:
            raise InvalidParam("invalid game: " + "; ".join(self.problems))


def validate_game(game: GameInstance) -> ValidationReport:
    """Check nonnegativity, the common-part hypothesis, and finite positivity depth."""
    problems = []
    if game.kind == "matrix":
        if game.set_min is None:
            problems.append("minimizer action set mixes support patterns (different parts)")
        if game.set_max is None:
            problems.append("maximizer action set mixes support patterns (different parts)")
    pm = game.pairs_flat
    if not np.all(np.isfinite(pm)):
        problems.append("pair matrix has non-finite entries")
    if np.any(pm < 0):
        problems.append("pair matrix has negative entries")
    ref = pm[0] > 0
    if not ref.any(axis=1).all():
        problems.append("pair support pattern has an empty row")
    for k in range(1, pm.shape[0]):
        if not np.array_equal(pm[k] > 0, ref):
            problems.append(f"pair matrix {k} has a different support pattern")
            break
    depth = None
    support = None
    if not problems:
        support = SupportPattern(ref)
        try:
            depth = positivity_depth(support)
        except NotPrimitive as exc:
            problems.append(str(exc))
    return ValidationReport(ok=not problems, problems=tuple(problems), depth=depth, support=support)


def _default_e_star(d: int, e_star=None) -> np.ndarray:
    if e_star is None:
        return np.ones(d)
    e = np.asarray(e_star, dtype=float)
    return e


def _try_matrix_set(mats: np.ndarray) -> MatrixSet | None:
    """A MatrixSet when all matrices share one support, else None.

    Mixed supports are legal input; validate_game reports them as a
    violation of the common-part hypothesis instead of refusing here.
    """
    try:
        return MatrixSet.from_matrices(mats)
    except DifferentParts:
        return None


def game_from_matrices(A, B, e_star=None, cone_generators=None) -> GameInstance:
    """Matrix multiplication game: pair dynamics x -> x A B."""
    a_mats = np.asarray(A, dtype=float)
    b_mats = np.asarray(B, dtype=float)
    if a_mats.ndim != 3 or b_mats.ndim != 3 or a_mats.shape[1] != a_mats.shape[2]:
        raise InvalidParam("action sets must be lists of square matrices")
    d = a_mats.shape[1]
    if b_mats.shape[1:] != (d, d):
        raise InvalidParam("action sets have mismatched dimensions")
    if np.any(a_mats < 0) or np.any(b_mats < 0):
        raise InvalidParam("action matrices must be nonnegative")
    if not (np.all(np.isfinite(a_mats)) and np.all(np.isfinite(b_mats))):
        raise InvalidParam("action matrices must be finite")
    pairs = np.einsum("aij,bjk->abik", a_mats, b_mats)
    return GameInstance(
        dim=d,
        e_star=_default_e_star(d, e_star),
        pair_matrices=pairs,
        a_labels=tuple(f"A{i + 1}" for i in range(len(a_mats))),
        b_labels=tuple(f"B{j + 1}" for j in range(len(b_mats))),
        kind="matrix",
        set_min=_try_matrix_set(a_mats),
        set_max=_try_matrix_set(b_mats),
        a_actions=tuple(np.array(M) for M in a_mats),
        b_actions=tuple(np.array(M) for M in b_mats),
        cone_generators=None if cone_generators is None else np.asarray(cone_generators, dtype=float),
    )


def game_from_leslie(alphas, betas, cone_generators=None) -> GameInstance:
    """Population game: minimizer picks alpha, maximizer picks beta."""
    alphas = tuple(tuple(float(v) for v in a) for a in alphas)
    betas = tuple(tuple(float(v) for v in b) for b in betas)
    if not alphas or not betas:
        raise InvalidParam("empty action set")
    pairs = np.array([[build_leslie(a, b) for b in betas] for a in alphas])
    return GameInstance(
        dim=3,
        e_star=np.ones(3),
        pair_matrices=pairs,
        a_labels=tuple(f"α{i + 1}" for i in range(len(alphas))),
        b_labels=tuple(f"β{j + 1}" for j in range(len(betas))),
        kind="leslie",
        a_actions=alphas,
        b_actions=betas,
        cone_generators=None if cone_generators is None else np.asarray(cone_generators, dtype=float),
    )


def game_from_pairs(pair_matrices, e_star=None, a_labels=None, b_labels=None) -> GameInstance:
    """Game given directly by its per-pair matrix family (na, nb, d, d)."""
    pm = np.asarray(pair_matrices, dtype=float)
    if pm.ndim != 4 or pm.shape[2] != pm.shape[3]:
        raise InvalidParam("pair_matrices must have shape (na, nb, d, d)")
    d = pm.shape[2]
    na, nb = pm.shape[:2]
    return GameInstance(
        dim=d,
        e_star=_default_e_star(d, e_star),
        pair_matrices=pm,
        a_labels=tuple(a_labels) if a_labels else tuple(f"a{i + 1}" for i in range(na)),
        b_labels=tuple(b_labels) if b_labels else tuple(f"b{j + 1}" for j in range(nb)),
        kind="pairs",
    )


def leslie_benchmark() -> GameInstance:
    """The three-age population benchmark game."""
    return game_from_leslie(LESLIE_ALPHAS, LESLIE_BETAS)


def game_from_dict(data: dict) -> GameInstance:
    """Build a game from the JSON description schema.

    Either {"dimension": d, "e_star": [...]?, "A": [matrix, ...], "B": [...]}
    or {"leslie": {"alphas": [[a1, a2], ...], "betas": [[b1, b2, b3], ...]}},
    optionally with {"cone": {"generators": [[...], ...]}}.
    """
    if not isinstance(data, dict):
        raise InvalidParam("game description must be a JSON object")
    cone = None
    if "cone" in data:
        cone_spec = data["cone"]
        if not isinstance(cone_spec, dict) or "generators" not in cone_spec:
            raise InvalidParam('"cone" must be an object with a "generators" list')
        cone = np.asarray(cone_spec["generators"], dtype=float)
    if "leslie" in data:
        les = data["leslie"]
        if not isinstance(les, dict) or "alphas" not in les or "betas" not in les:
            raise InvalidParam('"leslie" must contain "alphas" and "betas"')
        return game_from_leslie(les["alphas"], les["betas"], cone_generators=cone)
    for key in ("dimension", "A", "B"):
        if key not in data:
            raise InvalidParam(f'game description lacks "{key}"')
    d = int(data["dimension"])
    A = [np.asarray(Mat, dtype=float).reshape(d, d) for Mat in data["A"]]
    B = [np.asarray(Mat, dtype=float).reshape(d, d) for Mat in data["B"]]
    return game_from_matrices(A, B, e_star=data.get("e_star"), cone_generators=cone)


def load_game(path) -> GameInstance:
    """Load a game description from a JSON file."""
    with open(Path(path)) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParam(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    return game_from_dict(data)
