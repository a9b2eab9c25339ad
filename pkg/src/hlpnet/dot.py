"""Graphviz export of the robot nets, the mission net and the system net."""

from __future__ import annotations

from typing import Iterator

from hlpnet.robot_net import RobotOPN
from hlpnet.spec_net import SpecOPN


def _q(s: str) -> str:
    # labels may carry \n escapes on purpose; only quotes need escaping
    return '"{}"'.format(str(s).replace('"', r"\""))


def _lines_to_str(lines: Iterator[str]) -> str:
    return "".join(lines)


def _robot_lines(net: RobotOPN) -> Iterator[str]:
    yield f"digraph {_q('robot_' + net.robot_id)} {{\n"
    yield "  rankdir=LR;\n"
    for p in net.places:
        style = ' style=filled fillcolor="#dddddd"' if p == net.marking else ""
        label = f"{p}\\n{net.place_label[p]}"
        yield f"  {_q(p)} [shape=circle label={_q(label)}{style}];\n"
    for t in net.transitions:
        label = f"{t.id}\\n{net.transition_label[t.id]}"
        yield f"  {_q(t.id)} [shape=box label={_q(label)}];\n"
        yield f"  {_q(t.src)} -> {_q(t.id)};\n"
        yield f"  {_q(t.id)} -> {_q(t.dst)};\n"
    yield "}\n"


def robot_net_dot(net: RobotOPN) -> str:
    """Places are circles labelled with their cell formula, transitions boxes."""
    return _lines_to_str(_robot_lines(net))


def spec_net_dot(net: SpecOPN, name: str = "spec") -> str:
    lines = [f"digraph {_q(name)} {{\n", "  rankdir=LR;\n"]
    for p in net.places:
        shape = "doublecircle" if p in net.final_places else "circle"
        style = ' style=filled fillcolor="#dddddd"' if p == net.marking else ""
        lines.append(f"  {_q(p)} [shape={shape}{style}];\n")
    for t in net.transitions:
        label = f"{t.id}\\n{t.guard}"
        lines.append(f"  {_q(t.id)} [shape=box label={_q(label)}];\n")
        lines.append(f"  {_q(t.src)} -> {_q(t.id)};\n")
        lines.append(f"  {_q(t.id)} -> {_q(t.dst)};\n")
    lines.append("}\n")
    return "".join(lines)


def system_net_dot(team_size: int) -> str:
    """Places Rb and Ms with transitions t1..t|R|, arcs both ways."""
    lines = ['digraph "system" {\n']
    lines.append('  "Rb" [shape=circle];\n  "Ms" [shape=circle];\n')
    for i in range(1, team_size + 1):
        t = f"t{i}"
        xs = "(" + ", ".join(f"x{j}" for j in range(1, i + 1)) + ")"
        label = _q(t + "\\ngef")
        lines.append(f"  {_q(t)} [shape=box label={label}];\n")
        lines.append(f"  \"Rb\" -> {_q(t)} [label={_q(xs)}];\n")
        lines.append(f"  {_q(t)} -> \"Rb\" [label={_q(xs)}];\n")
        lines.append(f'  "Ms" -> {_q(t)} [label="n"];\n')
        lines.append(f'  {_q(t)} -> "Ms" [label="n"];\n')
    lines.append("}\n")
    return "".join(lines)
