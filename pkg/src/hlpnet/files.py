"""JSON loaders and writers.  Errors carry the file name and, where the
JSON parser provides one, the line and column."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from hlpnet.environment import Cell, Environment, Region, validate
from hlpnet.errors import HLPNError, InputError
from hlpnet.ltl import compile_to_specopn, parse_formula
from hlpnet.robot_net import RobotOPN, build_robot_net, robots_to_json
from hlpnet.simulator import Trace
from hlpnet.spec_net import SpecOPN, spec_from_json, spec_to_json

CASE_STUDY = {
    "env": "environment.json",
    "robots": "robots.json",
    "spec": "mission.json",
}


def data_path(name: str) -> Path:
    """Path of a bundled data file."""
    return Path(str(resources.files("hlpnet") / "data" / name))


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def env_from_json(data: dict) -> Environment:
    try:
        return Environment(
            regions=tuple(Region(r["id"], r["prop"]) for r in data["regions"]),
            free_region=data["free_region"],
            cells=tuple(
                Cell(c["id"], tuple(c["regions"]), c["capacity"]) for c in data["cells"]
            ),
            adjacency=frozenset(frozenset(pair) for pair in data["adjacency"]),
            team_size=data["team_size"],
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed environment: missing or bad field {exc}") from None


def env_to_json(env: Environment) -> dict:
    order = {c: i for i, c in enumerate(env.cell_ids)}
    pairs = sorted(
        (sorted(pair, key=lambda c: order.get(c, len(order))) for pair in env.adjacency),
        key=lambda p: [order.get(c, len(order)) for c in p],
    )
    return {
        "regions": [{"id": r.id, "prop": r.prop} for r in env.regions],
        "free_region": env.free_region,
        "cells": [
            {"id": c.id, "regions": list(c.regions), "capacity": c.capacity} for c in env.cells
        ],
        "adjacency": pairs,
        "team_size": env.team_size,
    }


def load_environment(path) -> Environment:
    data = read_json(path)
    try:
        env = env_from_json(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    problems = validate(env)
    if problems:
        raise InputError(f"{path}: invalid environment: " + "; ".join(map(str, problems)))
    return env


def robots_from_json(data: list, env: Environment) -> list[RobotOPN]:
    nets = []
    for i, entry in enumerate(data):
        try:
            nets.append(
                build_robot_net(env, entry["id"], entry["allowed_cells"], entry["initial_cell"])
            )
        except KeyError as exc:
            raise InputError(f"robot #{i}: missing field {exc}") from None
        except HLPNError as exc:
            raise InputError(f"robot #{i}: {exc}") from None
    return nets


def load_robots(path, env: Environment) -> list[RobotOPN]:
    data = read_json(path)
    if not isinstance(data, list):
        raise InputError(f"{path}: expected a list of robots")
    try:
        return robots_from_json(data, env)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def initial_observation(env: Environment, robots: Sequence[RobotOPN]) -> set[str]:
    return {p for r in robots for p in env.cell_props(r.cell)}


def spec_from_data(data: dict, env: Environment, robots: Sequence[RobotOPN] | None = None) -> SpecOPN:
    if not isinstance(data, dict):
        raise InputError("expected a JSON object")
    if "ltl" in data:
        formula = parse_formula(data["ltl"], env.props)
        obs0 = initial_observation(env, robots) if robots else None
        return compile_to_specopn(formula, env, initial_observation=obs0)
    net = spec_from_json(data, prop_order=env.props)
    unknown = set(net.props) - set(env.props)
    if unknown:
        raise InputError(f"guards use unknown propositions {sorted(unknown)}")
    return net


def load_spec(path, env: Environment, robots: Sequence[RobotOPN] | None = None) -> SpecOPN:
    data = read_json(path)
    try:
        return spec_from_data(data, env, robots)
    except HLPNError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_formula(path, env: Environment):
    data = read_json(path)
    if isinstance(data, dict) and "ltl" in data:
        try:
            return parse_formula(data["ltl"], env.props)
        except HLPNError as exc:
            raise InputError(f"{path}: {exc}") from None
    return None


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def write_traces(traces: Iterable[Trace], path, metric: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in traces:
            fh.write(json.dumps(t.to_json(metric), sort_keys=False, ensure_ascii=False))
            fh.write("\n")


def read_traces(path, env: Environment) -> list[Trace]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    out = []
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            out.append(Trace.from_json(json.loads(line), env.props))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{n}:{exc.colno}: {exc.msg}") from None
        except (KeyError, TypeError, HLPNError) as exc:
            raise InputError(f"{path}:{n}: malformed trace ({exc})") from None
    return out


__all__ = [
    "CASE_STUDY",
    "data_path",
    "dump_json",
    "env_from_json",
    "env_to_json",
    "load_environment",
    "load_formula",
    "load_robots",
    "load_spec",
    "read_json",
    "read_traces",
    "robots_from_json",
    "robots_to_json",
    "spec_from_data",
    "spec_to_json",
    "write_traces",
]
