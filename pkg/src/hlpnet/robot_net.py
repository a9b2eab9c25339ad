"""Per-robot state-machine nets.

One place per cell the robot may enter, one transition per ordered pair of
adjacent allowed cells.  The net is safe: exactly one place is marked.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Iterable

from hlpnet.environment import Environment, cell_label
from hlpnet.errors import SemanticsError, StructuralError
from hlpnet.guards import Guard


@dataclass(frozen=True)
class RobotTransition:
    id: str
    src: str
    dst: str


def move_id(src_cell: str, dst_cell: str) -> str:
    return f"t_{src_cell}_{dst_cell}"


@dataclass
class RobotOPN:
    robot_id: str
    places: tuple[str, ...]
    transitions: tuple[RobotTransition, ...]
    gamma: dict[str, str]
    place_label: dict[str, Guard]
    transition_label: dict[str, Guard]
    marking: str
    _by_id: dict = field(init=False, repr=False, compare=False)
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._by_id = {t.id: t for t in self.transitions}
        out: dict[str, list[RobotTransition]] = {p: [] for p in self.places}
        for t in self.transitions:
            out.setdefault(t.src, []).append(t)
        self._out = {p: tuple(ts) for p, ts in out.items()}

    @property
    def cell(self) -> str:
        """Cell of the marked place."""
        return self.gamma[self.marking]

    def transition(self, tid: str) -> RobotTransition:
        try:
            return self._by_id[tid]
        except KeyError:
            raise StructuralError(f"robot {self.robot_id} has no transition {tid!r}") from None

    def has_transition(self, tid: str) -> bool:
        return tid in self._by_id

    def outgoing(self, place: str) -> tuple[RobotTransition, ...]:
        return self._out.get(place, ())

    def marking_vector(self) -> dict[str, int]:
        return {p: int(p == self.marking) for p in self.places}

    def with_marking(self, place: str) -> RobotOPN:
        if place not in self._out:
            raise StructuralError(f"robot {self.robot_id} has no place {place!r}")
        new = copy.copy(self)
        new.marking = place
        return new

    @property
    def allowed_cells(self) -> tuple[str, ...]:
        return tuple(self.gamma[p] for p in self.places)


def build_robot_net(
    env: Environment, robot_id: str, allowed_cells: Iterable[str], initial_cell: str
) -> RobotOPN:
    allowed = set(allowed_cells)
    for c in allowed:
        if not env.has_cell(c):
            raise StructuralError(f"robot {robot_id}: allowed cell {c!r} is not in the environment")
    if initial_cell not in allowed:
        raise StructuralError(f"robot {robot_id}: initial cell {initial_cell!r} is not allowed")
    # places follow the environment's cell order, independent of input order
    places = tuple(c for c in env.cell_ids if c in allowed)
    transitions = []
    for src in places:
        for dst in env.neighbours(src):
            if dst in allowed:
                transitions.append(RobotTransition(move_id(src, dst), src, dst))
    place_label = {p: cell_label(env, p) for p in places}
    return RobotOPN(
        robot_id=robot_id,
        places=places,
        transitions=tuple(transitions),
        gamma={p: p for p in places},
        place_label=place_label,
        transition_label={t.id: place_label[t.dst] for t in transitions},
        marking=initial_cell,
    )


def check_robot_net(net: RobotOPN, env: Environment) -> list[str]:
    """Structural problems of a (possibly hand-built) robot net."""
    problems = []
    cells = list(net.gamma.values())
    if len(set(cells)) != len(cells):
        problems.append("gamma is not injective")
    for p in net.places:
        if p not in net.gamma:
            problems.append(f"place {p} has no cell")
        elif not env.has_cell(net.gamma[p]):
            problems.append(f"place {p} maps to unknown cell {net.gamma[p]}")
    for t in net.transitions:
        if t.src not in net.gamma or t.dst not in net.gamma:
            problems.append(f"transition {t.id} has a dangling arc")
            continue
        if not env.adjacent(net.gamma[t.src], net.gamma[t.dst]):
            problems.append(f"transition {t.id} joins non-adjacent cells")
        if net.transition_label.get(t.id) != net.place_label.get(t.dst):
            problems.append(f"transition {t.id} label differs from its output place label")
    if net.marking not in net.places:
        problems.append(f"marked place {net.marking} is not a place")
    return problems


def enabled_moves(net: RobotOPN) -> list[str]:
    return [t.id for t in net.outgoing(net.marking)]


def fire_move(net: RobotOPN, tid: str) -> RobotOPN:
    t = net.transition(tid)
    if t.src != net.marking:
        raise SemanticsError(
            f"robot {net.robot_id}: {tid} is not enabled (token in {net.marking})"
        )
    return net.with_marking(t.dst)


def robots_to_json(nets: Iterable[RobotOPN]) -> list[dict]:
    return [
        {"id": n.robot_id, "allowed_cells": list(n.allowed_cells), "initial_cell": n.cell}
        for n in nets
    ]
