"""Command-line interface.

Subcommands: plan, compile-spec, oracle, export-dot, check-trace.  Without
``--env/--robots/--spec`` the bundled case study is used.  ``HLPN_CONFIG``
may point at a JSON file whose keys (env, robots, spec, runs, max_steps,
seed, metric) supply defaults; relative paths in it are resolved against the
file's directory.

Exit codes: 0 success, 1 input error, 2 no plan / unreachable / failed check.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from hlpnet import __version__
from hlpnet.dot import robot_net_dot, spec_net_dot, system_net_dot
from hlpnet.errors import HLPNError
from hlpnet.files import (
    CASE_STUDY,
    data_path,
    dump_json,
    load_environment,
    load_formula,
    load_robots,
    load_spec,
    read_json,
    read_traces,
    write_traces,
)
from hlpnet.ltl import compile_to_specopn, parse_formula
from hlpnet.simulator import METRICS, SYNC_STEPS, TOTAL_MOVES, format_plan, run_batch
from hlpnet.spec_net import spec_to_json
from hlpnet.verifier import DEFAULT_MAX_STATES, bfs_optimum, eval_ltl, observations, replay

CONFIG_ENV = "HLPN_CONFIG"
EXIT_OK, EXIT_INPUT, EXIT_NONE = 0, 1, 2

log = logging.getLogger("hlpnet")


@dataclass
class RunConfig:
    env: Path
    robots: Path
    spec: Path
    runs: int = 100
    max_steps: int = 50
    seed: int = 0
    metric: str = TOTAL_MOVES
    out: Path | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")


def _config_defaults() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    data = read_json(path)
    if not isinstance(data, dict):
        raise HLPNError(f"{path}: config must be a JSON object")
    base = Path(path).parent
    for key in ("env", "robots", "spec"):
        if key in data:
            data[key] = base / data[key]
    return data


def _resolve(args, defaults: dict, key: str) -> Path:
    value = getattr(args, key, None)
    if value is not None:
        return Path(value)
    if key in defaults:
        return Path(defaults[key])
    return data_path(CASE_STUDY[key])


def _load(args, defaults):
    env = load_environment(_resolve(args, defaults, "env"))
    robots = load_robots(_resolve(args, defaults, "robots"), env)
    spec = load_spec(_resolve(args, defaults, "spec"), env, robots)
    return env, robots, spec


def cmd_plan(args, defaults) -> int:
    env, robots, spec = _load(args, defaults)
    cfg = RunConfig(
        env=_resolve(args, defaults, "env"),
        robots=_resolve(args, defaults, "robots"),
        spec=_resolve(args, defaults, "spec"),
        runs=args.runs if args.runs is not None else defaults.get("runs", 100),
        max_steps=args.max_steps if args.max_steps is not None else defaults.get("max_steps", 50),
        seed=args.seed if args.seed is not None else defaults.get("seed", 0),
        metric=args.metric or defaults.get("metric", TOTAL_MOVES),
        out=Path(args.out) if args.out else None,
    )
    result = run_batch(
        env, robots, spec, cfg.seed, cfg.runs, cfg.max_steps, cfg.metric, parallel=args.parallel
    )
    if cfg.out is not None:
        write_traces(result.traces, cfg.out, cfg.metric)
    report = dict(result.summary)
    report["timing"] = result.timing
    if result.best is not None:
        plan = format_plan(result.best, env, robots)
        report["plan"] = plan.splitlines()
        print(plan, file=sys.stderr)
    print(json.dumps(report, indent=2, ensure_ascii=False))
    return EXIT_OK if result.best is not None else EXIT_NONE


def cmd_compile_spec(args, defaults) -> int:
    env = load_environment(_resolve(args, defaults, "env"))
    if args.formula is not None:
        formula = parse_formula(args.formula, env.props)
        spec = compile_to_specopn(formula, env)
    else:
        robots = None
        if args.robots is not None or "robots" in defaults:
            robots = load_robots(_resolve(args, defaults, "robots"), env)
        spec = load_spec(_resolve(args, defaults, "spec"), env, robots)
    text = spec_net_dot(spec) if args.format == "dot" else dump_json(spec_to_json(spec))
    _emit(text, args.out)
    if args.dot:
        Path(args.dot).write_text(spec_net_dot(spec), encoding="utf-8")
    return EXIT_OK


def cmd_oracle(args, defaults) -> int:
    env, robots, spec = _load(args, defaults)
    metric = args.metric or SYNC_STEPS
    result = bfs_optimum(env, robots, spec, metric, max_states=args.max_states)
    if result is None:
        _emit(dump_json({"optimum": None, "metric": metric, "witness": None}), args.out)
        return EXIT_NONE
    _emit(dump_json(result.to_json()), args.out)
    return EXIT_OK


def cmd_export_dot(args, defaults) -> int:
    env, robots, spec = _load(args, defaults)
    files = {"system.dot": system_net_dot(len(robots)), "spec.dot": spec_net_dot(spec)}
    for r in robots:
        files[f"robot_{r.robot_id}.dot"] = robot_net_dot(r)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write("\n".join(files.values()))
    return EXIT_OK


def cmd_check_trace(args, defaults) -> int:
    env, robots, spec = _load(args, defaults)
    formula = load_formula(_resolve(args, defaults, "spec"), env)
    traces = read_traces(args.trace, env)
    if args.run is not None:
        traces = [t for t in traces if t.run == args.run]
    if not traces:
        raise HLPNError(f"{args.trace}: no trace selected")
    verdicts = []
    for t in traces:
        entry = {"run": t.run, "replay": replay(t, env, robots, spec)}
        if formula is not None:
            entry["ltl"] = eval_ltl(formula, observations(t, env, robots, spec))
        entry["verdict"] = all(v for k, v in entry.items() if k != "run")
        verdicts.append(entry)
    print(json.dumps(verdicts if len(verdicts) > 1 else verdicts[0], indent=2))
    return EXIT_OK if all(v["verdict"] for v in verdicts) else EXIT_NONE


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hlpn", description="Plan robot-team missions with synchronized Petri nets."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def files(p, spec=True, robots=True):
        p.add_argument("--env", help="environment JSON")
        if robots:
            p.add_argument("--robots", help="robots JSON")
        if spec:
            p.add_argument("--spec", help="mission net JSON, or {\"ltl\": ...}")

    p = sub.add_parser("plan", help="search for plans by repeated simulation")
    files(p)
    p.add_argument("--runs", type=int)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--metric", choices=METRICS)
    p.add_argument("--out", help="write one JSON trace per run (JSON lines)")
    p.add_argument("--parallel", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("compile-spec", help="compile an LTL mission into a mission net")
    files(p)
    p.add_argument("--formula", help="formula text instead of --spec")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--out")
    p.add_argument("--dot", help="also write the DOT rendering here")
    p.set_defaults(func=cmd_compile_spec)

    p = sub.add_parser("oracle", help="exact optimum by explicit product search")
    files(p)
    p.add_argument("--metric", choices=METRICS)
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-dot", help="write every net as Graphviz DOT")
    files(p)
    p.add_argument("--out", help="output directory (default: stdout)")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("check-trace", help="replay traces and check the mission formula")
    files(p)
    p.add_argument("--trace", required=True, help="JSON-lines trace file")
    p.add_argument("--run", type=int, help="check only this run index")
    p.set_defaults(func=cmd_check_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        defaults = _config_defaults()
        return args.func(args, defaults)
    except (HLPNError, ValueError) as exc:
        print(f"hlpn: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
