"""Scenario documents: parsing, validation and resolution to runtime objects."""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, replace

import numpy as np

from . import games as _games
from .dynamics import FORMS, DynamicsSpec
from .errors import ScenarioError
from .hessian import potential_p
from .integrator import SCHEMES, IntegratorConfig
from .metrics import MetricField, constant_metric, prep

SCHEMA_VERSION = 1
MONITOR_NAMES = ("potential_f", "bregman_to", "kl_to", "payoff_correlation", "speed")

# shorthand name -> p of the p-replicator family
METRIC_ALIASES = {
    "replicator": 1.0, "shahshahani": 1.0,
    "projection": 0.0, "euclidean": 0.0,
    "logbarrier": 2.0, "log-barrier": 2.0,
}
POTENTIAL_IDS = {"entropy": 1.0, "log": 2.0, "quadratic": 0.0}


def _num(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(where, f"expected a number, got {value!r}")
    if not np.isfinite(value):
        raise ScenarioError(where, "must be finite")
    return float(value)


def _matrix(value, where) -> tuple:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ScenarioError(where, "expected a nonempty list of rows")
    n = len(value)
    if any(len(r) != n for r in value):
        raise ScenarioError(where, "matrix must be square")
    return tuple(tuple(_num(a, f"{where}[{i}][{j}]") for j, a in enumerate(r)) for i, r in enumerate(value))


def _point(value, where, n) -> tuple:
    if not isinstance(value, list):
        raise ScenarioError(where, "expected a list of shares")
    p = tuple(_num(a, f"{where}[{i}]") for i, a in enumerate(value))
    if len(p) != n:
        raise ScenarioError(where, f"expected {n} coordinates, got {len(p)}")
    if min(p) < 0 or abs(sum(p) - 1.0) > 1e-9:
        raise ScenarioError(where, "not a point of the simplex (nonnegative, summing to 1)")
    return p


@dataclass(frozen=True)
class GameSpec:
    builtin: str | None = None
    params: tuple = ()  # sorted (key, value) pairs for builtins
    matrix: tuple | None = None
    name: str = "matrix"
    symmetric: bool = False  # declared potential game

    @classmethod
    def parse(cls, value, where="game") -> "GameSpec":
        if isinstance(value, str):
            value = {"builtin": value}
        if not isinstance(value, dict):
            raise ScenarioError(where, "expected a builtin name or an object")
        if ("builtin" in value) == ("matrix" in value):
            raise ScenarioError(where, "give exactly one of 'builtin' or 'matrix'")
        if "builtin" in value:
            b = value["builtin"]
            if b not in _games.BUILTINS:
                raise ScenarioError(f"{where}.builtin", f"unknown game {b!r}; known: {sorted(_games.BUILTINS)}")
            params = value.get("params", {})
            if not isinstance(params, dict):
                raise ScenarioError(f"{where}.params", "expected an object")
            spec = cls(builtin=b, params=tuple(sorted(params.items())))
            try:
                spec.build()
            except TypeError as exc:
                raise ScenarioError(f"{where}.params", str(exc)) from None
            return spec
        A = _matrix(value["matrix"], f"{where}.matrix")
        sym = value.get("symmetric", False)
        if not isinstance(sym, bool):
            raise ScenarioError(f"{where}.symmetric", "expected true or false")
        if sym and not np.allclose(np.array(A), np.array(A).T, rtol=0, atol=1e-14):
            raise ScenarioError(f"{where}.symmetric", "declared symmetric but the matrix is not")
        return cls(matrix=A, name=str(value.get("name", "matrix")), symmetric=sym)

    def build(self) -> _games.PopulationGame:
        if self.builtin is not None:
            return _games.BUILTINS[self.builtin](**dict(self.params))
        return _games.matching_game(np.array(self.matrix), name=self.name)

    def to_dict(self):
        if self.builtin is not None:
            d = {"builtin": self.builtin}
            if self.params:
                d["params"] = dict(self.params)
            return d
        return {"matrix": [list(r) for r in self.matrix], "name": self.name, "symmetric": self.symmetric}


@dataclass(frozen=True)
class MetricSpec:
    kind: str  # prep | hessian | constant
    p: float | None = None
    potential: str | None = None
    g_sharp: tuple | None = None

    @classmethod
    def parse(cls, value, where="metric") -> "MetricSpec":
        if isinstance(value, str):
            if value in METRIC_ALIASES:
                return cls("prep", p=METRIC_ALIASES[value])
            if value.startswith("prep:"):
                try:
                    p = float(value[5:])
                except ValueError:
                    raise ScenarioError(where, f"bad exponent in {value!r}") from None
                value = {"kind": "prep", "p": p}
            else:
                raise ScenarioError(where, f"unknown metric {value!r}")
        if not isinstance(value, dict) or "kind" not in value:
            raise ScenarioError(where, "expected a metric name or an object with 'kind'")
        kind = value["kind"]
        if kind == "prep":
            p = _num(value.get("p"), f"{where}.p")
            if p < 0:
                raise ScenarioError(f"{where}.p", "must be nonnegative")
            return cls("prep", p=p)
        if kind == "hessian":
            pid = value.get("potential")
            if not isinstance(pid, str) or not (pid in POTENTIAL_IDS or pid.startswith("power:")):
                raise ScenarioError(f"{where}.potential",
                                    f"expected one of {sorted(POTENTIAL_IDS)} or 'power:<p>'")
            if pid.startswith("power:"):
                try:
                    if float(pid[6:]) < 0:
                        raise ValueError
                except ValueError:
                    raise ScenarioError(f"{where}.potential", f"bad exponent in {pid!r}") from None
            return cls("hessian", potential=pid)
        if kind == "constant":
            G = _matrix(value.get("g_sharp"), f"{where}.g_sharp")
            A = np.array(G)
            if not np.allclose(A, A.T) or np.linalg.eigvalsh(A).min() <= 0:
                raise ScenarioError(f"{where}.g_sharp", "must be symmetric positive definite")
            return cls("constant", g_sharp=G)
        raise ScenarioError(f"{where}.kind", f"unknown metric kind {kind!r}")

    def build(self, n: int) -> MetricField:
        if self.kind == "prep":
            return prep(n, self.p)
        if self.kind == "hessian":
            pid = self.potential
            p = POTENTIAL_IDS[pid] if pid in POTENTIAL_IDS else float(pid[6:])
            return potential_p(p).metric(n)
        return constant_metric(np.array(self.g_sharp))

    def to_dict(self):
        if self.kind == "prep":
            return {"kind": "prep", "p": self.p}
        if self.kind == "hessian":
            return {"kind": "hessian", "potential": self.potential}
        return {"kind": "constant", "g_sharp": [list(r) for r in self.g_sharp]}


def interior_grid(n: int, density: int) -> list[tuple]:
    """Interior lattice points ``k / density`` of the simplex (all coordinates positive)."""
    pts = []
    for c in itertools.product(range(1, density), repeat=n - 1):
        last = density - sum(c)
        if last >= 1:
            pts.append(tuple(a / density for a in (*c, last)))
    return pts


@dataclass(frozen=True)
class Scenario:
    game: GameSpec
    metric: MetricSpec
    points: tuple = ()
    grid: int | None = None
    form: str = "projected"
    scheme: str = "auto"
    step: float = 1e-3
    t_end: float = 10.0
    monitors: tuple = ()
    x_star: tuple | None = None
    out_dir: str = "."
    prefix: str = "traj"
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, d) -> "Scenario":
        if not isinstance(d, dict):
            raise ScenarioError("<root>", "scenario must be a JSON object")
        known = {"schema_version", "game", "metric", "form", "initial_conditions", "integrator",
                 "monitors", "x_star", "output", "seed"}
        extra = sorted(set(d) - known)
        if extra:
            raise ScenarioError(extra[0], "unknown field")
        ver = d.get("schema_version", SCHEMA_VERSION)
        if ver != SCHEMA_VERSION:
            raise ScenarioError("schema_version", f"unsupported version {ver!r}")
        for req in ("game", "metric", "initial_conditions"):
            if req not in d:
                raise ScenarioError(req, "missing required field")
        game = GameSpec.parse(d["game"])
        try:
            n = game.build().n
        except ValueError as exc:
            raise ScenarioError("game", str(exc)) from None
        metric = MetricSpec.parse(d["metric"])
        if metric.kind == "constant" and len(metric.g_sharp) != n:
            raise ScenarioError("metric.g_sharp", f"dimension {len(metric.g_sharp)} does not match game ({n})")
        form = d.get("form", "projected")
        if form not in FORMS:
            raise ScenarioError("form", f"expected one of {FORMS}")

        ic = d["initial_conditions"]
        if not isinstance(ic, dict) or ("points" in ic) == ("grid" in ic):
            raise ScenarioError("initial_conditions", "give exactly one of 'points' or 'grid'")
        points, grid = (), None
        if "points" in ic:
            if not isinstance(ic["points"], list) or not ic["points"]:
                raise ScenarioError("initial_conditions.points", "expected a nonempty list")
            points = tuple(_point(p, f"initial_conditions.points[{i}]", n) for i, p in enumerate(ic["points"]))
        else:
            grid = ic["grid"]
            if isinstance(grid, bool) or not isinstance(grid, int) or grid < n:
                raise ScenarioError("initial_conditions.grid", f"expected an integer >= {n}")

        integ = d.get("integrator", {})
        if not isinstance(integ, dict):
            raise ScenarioError("integrator", "expected an object")
        scheme = integ.get("scheme", "auto")
        if scheme not in SCHEMES:
            raise ScenarioError("integrator.scheme", f"expected one of {SCHEMES}")
        step = _num(integ.get("step", 1e-3), "integrator.step")
        t_end = _num(integ.get("t_end", 10.0), "integrator.t_end")
        if step <= 0 or t_end <= 0 or step > t_end:
            raise ScenarioError("integrator", "need 0 < step <= t_end")

        mons = d.get("monitors", [])
        if not isinstance(mons, list) or any(m not in MONITOR_NAMES for m in mons):
            raise ScenarioError("monitors", f"expected a list drawn from {MONITOR_NAMES}")
        x_star = d.get("x_star")
        if x_star is not None:
            x_star = _point(x_star, "x_star", n)
        if any(m in ("bregman_to", "kl_to") for m in mons) and x_star is None:
            raise ScenarioError("x_star", "required by the bregman_to/kl_to monitors")
        if "potential_f" in mons and game.build().potential is None:
            raise ScenarioError("monitors", "potential_f requested but the game has no potential")

        out = d.get("output", {})
        if not isinstance(out, dict):
            raise ScenarioError("output", "expected an object")
        seed = d.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ScenarioError("seed", "expected a nonnegative integer")
        return cls(game=game, metric=metric, points=points, grid=grid, form=form, scheme=scheme,
                   step=step, t_end=t_end, monitors=tuple(mons), x_star=x_star,
                   out_dir=str(out.get("dir", ".")), prefix=str(out.get("prefix", "traj")), seed=seed)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"line {exc.lineno}", exc.msg) from None
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        d = {
            "schema_version": self.schema_version,
            "game": self.game.to_dict(),
            "metric": self.metric.to_dict(),
            "form": self.form,
            "initial_conditions": ({"grid": self.grid} if self.grid is not None
                                   else {"points": [list(p) for p in self.points]}),
            "integrator": {"scheme": self.scheme, "step": self.step, "t_end": self.t_end},
            "monitors": list(self.monitors),
            "output": {"dir": self.out_dir, "prefix": self.prefix},
            "seed": self.seed,
        }
        if self.x_star is not None:
            d["x_star"] = list(self.x_star)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def digest(self) -> str:
        # where results are written does not change them
        d = self.to_dict()
        d["output"].pop("dir")
        canon = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def with_overrides(self, **kw) -> "Scenario":
        kw = {k: v for k, v in kw.items() if v is not None}
        s = replace(self, **kw)
        if not (0 < s.step <= s.t_end):
            raise ScenarioError("integrator", "need 0 < step <= t_end")
        return s

    # runtime objects
    def build_spec(self) -> DynamicsSpec:
        game = self.game.build()
        return DynamicsSpec(game, self.metric.build(game.n), self.form)

    def initial_states(self) -> np.ndarray:
        n = self.game.build().n
        pts = self.points if self.grid is None else interior_grid(n, self.grid)
        return np.array(pts, dtype=float)

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(scheme=self.scheme, step=self.step, t_end=self.t_end)
