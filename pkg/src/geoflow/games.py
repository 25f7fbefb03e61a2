"""Population games: payoffs, structure checks and equilibrium enumeration."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import EvaluationFailure
from .numerics import zero_sum_projector
from .simplex import random_simplex_points

PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class PotentialSpec:
    """Potential ``f`` with ``df(x) == v(x)`` on a neighborhood of the simplex."""

    f: Callable[[np.ndarray], float]
    df: Callable[[np.ndarray], np.ndarray]
    f_rows: Callable[[np.ndarray], np.ndarray] | None = None  # optional batch form over rows

    def values(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.f_rows is not None:
            return np.asarray(self.f_rows(X), dtype=float)
        return np.array([self.f(x) for x in X])


@dataclass(frozen=True, eq=False)
class PopulationGame:
    """A single-population game given by its payoff map ``x -> v(x)``.

    Games built from a payoff matrix keep it in ``matrix``; several checks
    (exact classification, enumeration, dominance) need it.
    """

    n: int
    payoff_fn: Callable[[np.ndarray], np.ndarray]
    matrix: np.ndarray | None = None
    potential: PotentialSpec | None = None
    name: str = "custom"
    symmetric: bool = field(default=False)

    def payoff(self, x) -> np.ndarray:
        return payoff(self, x)


def matching_game(A, name: str = "matching", potential: PotentialSpec | None = None) -> PopulationGame:
    """Random-matching game with ``v(x) = A x``.

    A symmetric ``A`` gets the potential ``f(x) = x.A.x / 2`` attached.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("payoff matrix must be square")
    A.setflags(write=False)
    sym = bool(np.allclose(A, A.T, rtol=0, atol=1e-14))
    if potential is None and sym:
        potential = PotentialSpec(f=lambda x: 0.5 * float(x @ A @ x), df=lambda x: A @ x,
                                  f_rows=lambda X: 0.5 * np.einsum("ij,jk,ik->i", X, A, X))
    return PopulationGame(n=A.shape[0], payoff_fn=lambda x: A @ x, matrix=A,
                          potential=potential, name=name, symmetric=sym)


def payoff(game: PopulationGame, x) -> np.ndarray:
    v = np.asarray(game.payoff_fn(np.asarray(x, dtype=float)), dtype=float)
    if v.shape != (game.n,) or not np.all(np.isfinite(v)):
        raise EvaluationFailure(f"payoff of {game.name} is not a finite covector at {x}")
    return v


# -- named games -------------------------------------------------------------

RPS_MATRIX = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])


def rps() -> PopulationGame:
    return matching_game(RPS_MATRIX, name="rps")


def rps_permanent() -> PopulationGame:
    """RPS with wins worth 2 and losses -1; satisfies the permanence condition."""
    return matching_game([[0, -1, 2], [2, 0, -1], [-1, 2, 0]], name="rps-permanent")


def rps_dominated(gap: float = 0.1) -> PopulationGame:
    """RPS plus a fourth strategy that earns ``gap`` less than Rock everywhere."""
    A = np.zeros((4, 4))
    A[:3, :3] = RPS_MATRIX
    A[:3, 3] = RPS_MATRIX[:, 0]
    A[3] = A[0] - gap
    return matching_game(A, name="rps-dominated")


def toy_game() -> PopulationGame:
    """Two strategies with constant payoffs ``v = (1, 0)``."""
    pot = PotentialSpec(f=lambda x: float(x[0]), df=lambda x: np.array([1.0, 0.0]))
    return matching_game([[1.0, 1.0], [0.0, 0.0]], name="toy", potential=pot)


def coordination(n: int = 3) -> PopulationGame:
    return matching_game(np.eye(n), name="coordination")


def contractive(n: int = 3) -> PopulationGame:
    return matching_game(-np.eye(n), name="contractive")


BUILTINS: dict[str, Callable[[], PopulationGame]] = {
    "rps": rps,
    "rps-permanent": rps_permanent,
    "rps-dominated": rps_dominated,
    "toy": toy_game,
    "coordination": coordination,
    "contractive": contractive,
}


# -- structure -----------------------------------------------------------------

class Contractivity(NamedTuple):
    kind: str  # strictly_contractive | contractive | conservative | none
    exact: bool


def _zero_sum_basis(n: int) -> np.ndarray:
    w, q = np.linalg.eigh(zero_sum_projector(n))
    return q[:, w > 0.5]


def classify_contractive(game: PopulationGame, samples: int = 2000,
                         rng: np.random.Generator | None = None, tol: float = 1e-10) -> Contractivity:
    """Classify ``sum_a (v_a(x') - v_a(x)) (x'_a - x_a)`` by sign.

    Matching games are classified exactly from the symmetric part of the
    payoff matrix on zero-sum directions; other games get a sampled verdict
    with ``exact=False``.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    if game.n == 1:
        return Contractivity("conservative", game.matrix is not None)
    if game.matrix is not None:
        B = _zero_sum_basis(game.n)
        S = B.T @ (0.5 * (game.matrix + game.matrix.T)) @ B
        lam = np.linalg.eigvalsh(S)
        scale = tol * max(1.0, np.abs(game.matrix).max())
        if np.all(np.abs(lam) <= scale):
            return Contractivity("conservative", True)
        if np.all(lam < -scale):
            return Contractivity("strictly_contractive", True)
        if np.all(lam <= scale):
            return Contractivity("contractive", True)
        return Contractivity("none", True)

    rng = np.random.default_rng(0) if rng is None else rng
    xs = random_simplex_points(rng, game.n, samples)
    ys = random_simplex_points(rng, game.n, samples)
    q = np.empty(samples)
    for i, (x, y) in enumerate(zip(xs, ys)):
        d = y - x
        q[i] = (payoff(game, y) - payoff(game, x)) @ d / max(d @ d, 1e-300)
    if np.all(np.abs(q) <= 1e-9):
        return Contractivity("conservative", False)
    if np.all(q < -1e-9):
        return Contractivity("strictly_contractive", False)
    if np.all(q <= 1e-9):
        return Contractivity("contractive", False)
    return Contractivity("none", False)


# -- equilibria ------------------------------------------------------------------

@dataclass
class EquilibriumSet:
    """Isolated equilibria plus the supports whose solution set is a continuum."""

    points: list[np.ndarray]
    degenerate_supports: list[tuple[int, ...]]

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def contains(self, x, tol: float = 1e-9) -> bool:
        return any(np.abs(p - x).max() <= tol for p in self.points)


def _require_matrix(game: PopulationGame) -> np.ndarray:
    if game.matrix is None:
        raise ValueError(f"game {game.name!r} has no payoff matrix")
    return game.matrix


def _equal_payoff_solutions(A: np.ndarray, tol: float, max_n: int = 12):
    """Yield ``(support, x or None, u)``; ``x is None`` flags a continuum."""
    n = A.shape[0]
    if n > max_n:
        raise ValueError(f"support enumeration limited to n <= {max_n}")
    for k in range(1, n + 1):
        for S in itertools.combinations(range(n), k):
            idx = list(S)
            M = np.zeros((k + 1, k + 1))
            M[:k, :k] = A[np.ix_(idx, idx)]
            M[:k, k] = -1.0
            M[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            sol, *_ , sv = np.linalg.lstsq(M, rhs, rcond=None)
            if np.linalg.norm(M @ sol - rhs) > 1e-8:
                continue  # inconsistent: no equal-payoff state on this face
            x = np.zeros(n)
            x[idx] = sol[:k]
            if sv.min() <= PIVOT_TOL * max(1.0, sv.max()):
                yield S, None, x
                continue
            yield S, x, sol[k]


def _dedupe(points, tol=1e-9):
    out: list[np.ndarray] = []
    for p in points:
        if not any(np.abs(p - q).max() <= tol for q in out):
            out.append(p)
    return out


def _enumerate(game, tol, nash: bool) -> EquilibriumSet:
    A = _require_matrix(game)
    points, degenerate = [], []
    for S, x, u in _equal_payoff_solutions(A, tol):
        if x is None:
            degenerate.append(S)
            continue
        if x.min() < -tol:
            continue
        x = np.clip(x, 0.0, None)
        x /= x.sum()
        if nash:
            v = A @ x
            if v.max() > x @ v + tol:
                continue
        points.append(x)
    return EquilibriumSet(_dedupe(points), degenerate)


def enumerate_nash(game: PopulationGame, tol: float = 1e-9) -> EquilibriumSet:
    """All Nash equilibria of a matching game with isolated support solutions."""
    return _enumerate(game, tol, nash=True)


def enumerate_restricted_equilibria(game: PopulationGame, tol: float = 1e-9) -> EquilibriumSet:
    """States at which every strategy in use earns the same payoff."""
    return _enumerate(game, tol, nash=False)


def is_nash(game: PopulationGame, x, tol: float = 1e-9) -> bool:
    v = payoff(game, x)
    return bool(v.max() <= np.asarray(x) @ v + tol)


def is_gess(game: PopulationGame, x_star, samples: int = 2000, margin: float = 1e-9,
            rng: np.random.Generator | None = None) -> bool:
    """Check ``<v(x), x - x*> <= -margin |x - x*|^2`` for x != x*.

    Exact for matching games with an interior candidate or a negative
    definite symmetric part; sampled otherwise.
    """
    x_star = np.asarray(x_star, dtype=float)
    if not is_nash(game, x_star):
        return False
    if game.matrix is not None:
        kind = classify_contractive(game).kind
        if kind == "strictly_contractive":
            return True
        if np.all(x_star > 0):
            return False
    rng = np.random.default_rng(0) if rng is None else rng
    for x in random_simplex_points(rng, game.n, samples, boundary_fraction=0.3):
        d = x - x_star
        dd = d @ d
        if dd < 1e-14:
            continue
        if payoff(game, x) @ d > -margin * dd:
            return False
    return True


def dominated_pairs(game: PopulationGame, tol: float = 1e-12) -> set[tuple[int, int]]:
    """Pairs ``(a, b)`` (0-based) where b earns strictly more than a at every state."""
    A = _require_matrix(game)
    out = set()
    for a, b in itertools.permutations(range(game.n), 2):
        if np.min(A[b] - A[a]) > tol:
            out.add((a, b))
    return out
