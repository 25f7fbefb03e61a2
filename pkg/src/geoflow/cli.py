"""``geoflow`` command line: simulate, portrait and audit a scenario file."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis
from .audit import build_report
from .errors import GeoflowError, ScenarioError
from .games import enumerate_nash, enumerate_restricted_equilibria
from .dynamics import speed
from .integrator import integrate, write_trajectory_csv
from .portrait import render_portrait
from .rl_bridge import integrate_rl
from .scenario import Scenario

log = logging.getLogger("geoflow")

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID, EXIT_DIMENSION = 0, 1, 2, 3


def _threads() -> int:
    raw = os.environ.get("GEOFLOW_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return os.cpu_count() or 1


def load_scenario(path, step=None, t_end=None, out_dir=None) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(str(path), exc.strerror or "cannot read file") from None
    return Scenario.from_json(text).with_overrides(step=step, t_end=t_end, out_dir=out_dir)


def run_all(scenario: Scenario):
    spec = scenario.build_spec()
    cfg = scenario.integrator_config()
    starts = scenario.initial_states()
    with ThreadPoolExecutor(max_workers=min(_threads(), len(starts))) as pool:
        trajs = list(pool.map(lambda x0: integrate(spec, x0, cfg), starts))
    return spec, trajs


def _monitors(scenario, spec, traj):
    x_star = None if scenario.x_star is None else np.array(scenario.x_star)
    return {m: analysis.monitor(traj, spec, m, x_star).values for m in scenario.monitors}


def cmd_simulate(scenario: Scenario, rl: bool = False) -> list[Path]:
    spec, trajs = run_all(scenario)
    out = Path(scenario.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for i, tr in enumerate(trajs):
        path = out / f"{scenario.prefix}_{i:03d}.csv"
        write_trajectory_csv(tr, path, _monitors(scenario, spec, tr))
        written.append(path)
        for w in tr.warnings:
            log.warning("%s: %s", path.name, w)
    if rl:
        hp = spec.metric.potential
        if hp is None or not hp.steep:
            raise ScenarioError("metric", "score-space runs need a steep Hessian metric")
        for i, x0 in enumerate(scenario.initial_states()):
            if not np.all(x0 > 0):
                continue
            st, _ = integrate_rl(hp, spec.game, x0=x0, cfg=scenario.integrator_config())
            path = out / f"{scenario.prefix}_{i:03d}_rl.csv"
            st.to_csv(path)
            written.append(path)
    return written


def cmd_portrait(scenario: Scenario) -> Path:
    spec, trajs = run_all(scenario)
    rest, nash = [], []
    if spec.game.matrix is not None:
        rest = [x for x in enumerate_restricted_equilibria(spec.game).points if speed(spec, x) < 1e-9]
        nash = enumerate_nash(spec.game).points
    title = f"{spec.game.name} / {spec.metric.descriptor}"
    if spec.metric.p is not None:
        title += f" p={spec.metric.p:g}"
    svg = render_portrait([t.states for t in trajs], rest, nash, title=title)
    out = Path(scenario.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{scenario.prefix}.svg"
    path.write_text(svg, encoding="utf-8")
    return path


def cmd_audit(scenario: Scenario) -> tuple[Path, dict]:
    spec, trajs = run_all(scenario)
    report = build_report(scenario, spec, trajs)
    out = Path(scenario.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{scenario.prefix}_audit.json"
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path, report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geoflow", description="Riemannian game dynamics on the simplex.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "integrate trajectories and write CSV files"),
                        ("portrait", "draw a ternary phase portrait (three strategies)"),
                        ("audit", "run structural checks and write a JSON report")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("scenario", help="scenario JSON file")
        p.add_argument("--out-dir", help="output directory (overrides the scenario)")
        p.add_argument("--step", type=float, help="integration step")
        p.add_argument("--t-end", type=float, help="time horizon")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "simulate":
            p.add_argument("--rl", action="store_true", help="also write score-space (RL) runs")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        scenario = load_scenario(args.scenario, args.step, args.t_end, args.out_dir)
        if args.command == "portrait":
            n = scenario.build_spec().n
            if n != 3:
                print(f"error: portraits need 3 strategies, scenario has {n}", file=sys.stderr)
                return EXIT_DIMENSION
            print(cmd_portrait(scenario))
        elif args.command == "simulate":
            for path in cmd_simulate(scenario, rl=args.rl):
                print(path)
        else:
            path, report = cmd_audit(scenario)
            for c in report["checks"]:
                print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']} margin={c['margin']:.3g}")
            print(path)
    except ScenarioError as exc:
        print(f"error: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GeoflowError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
