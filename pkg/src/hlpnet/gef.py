"""The global enabling function: the guard of every synchronized step.

The bound robot moves are fired fictitiously.  The step is allowed when the
resulting per-cell placement respects every capacity and the mission
transition's guard holds on the resulting per-region occupancy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from hlpnet.environment import Environment
from hlpnet.errors import SemanticsError, StructuralError
from hlpnet.guards import Guard
from hlpnet.multiset import Bag


@dataclass(frozen=True)
class Binding:
    """One mission transition plus the moves of the robots that take part.

    ``moves`` is a tuple of ``(robot_id, transition_id)`` pairs.
    """

    spec_transition: str
    moves: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, spec_transition: str, moves: Mapping[str, str]) -> Binding:
        return cls(spec_transition, tuple(moves.items()))

    @property
    def arity(self) -> int:
        return len(self.moves)

    @property
    def robots(self) -> tuple[str, ...]:
        return tuple(r for r, _ in self.moves)

    def moves_dict(self) -> dict[str, str]:
        return dict(self.moves)


def check_binding(state, binding: Binding, env: Environment) -> None:
    """Raise if the binding is malformed or not marking-enabled."""
    if not binding.moves:
        raise StructuralError("a binding must move at least one robot")
    robots = binding.robots
    if len(set(robots)) != len(robots):
        raise StructuralError(f"robot bound twice in {binding}")
    if len(robots) > env.team_size:
        raise StructuralError(f"binding moves {len(robots)} robots, team has {env.team_size}")
    spec = state.spec
    t = spec.transition(binding.spec_transition)
    if t.src != spec.marking:
        raise SemanticsError(f"mission transition {t.id} is not marking-enabled")
    for rid, tid in binding.moves:
        net = state.robot(rid)
        move = net.transition(tid)
        if move.src != net.marking:
            raise SemanticsError(f"robot {rid}: move {tid} is not marking-enabled")


def simulate(state, binding: Binding, env: Environment) -> tuple[Bag, Bag]:
    """Fictitiously fire the moves.

    Returns the per-cell placement bag and the updated per-proposition
    occupancy.  Robots that are not bound stay where they are.
    """
    moved = binding.moves_dict()
    cells = []
    leaving: list[str] = []
    entering: list[str] = []
    for net in state.robots:
        if net.robot_id in moved:
            old = net.gamma[net.marking]
            new = net.gamma[net.transition(moved[net.robot_id]).dst]
            leaving.extend(env.cell_props(old))
            entering.extend(env.cell_props(new))
            cells.append(new)
        else:
            cells.append(net.gamma[net.marking])
    chi = Bag.from_iterable(env.cell_ids, cells)
    occ = state.occupancy.sub(Bag.from_iterable(env.props, leaving))
    occ = occ.add(Bag.from_iterable(env.props, entering))
    return chi, occ


def capacity_ok(chi: Bag, env: Environment) -> bool:
    for c in env.cells:
        if chi.get(c.id) > c.capacity:
            return False
    return True


def guard_admits(guard: Guard, occ: Bag) -> bool:
    """Literal check on the simulated occupancy (positive needs >= 1, negated needs 0)."""
    if guard.is_true:
        return True
    wanted = dict(guard.literals)
    for prop in occ.universe:
        if prop not in wanted:
            continue
        n = occ.get(prop)
        if wanted[prop] and n == 0:
            return False
        if not wanted[prop] and n >= 1:
            return False
    return True


def gef(state, binding: Binding, env: Environment) -> bool:
    check_binding(state, binding, env)
    chi, occ = simulate(state, binding, env)
    if not capacity_ok(chi, env):
        return False
    guard = state.spec.transition(binding.spec_transition).guard
    unknown = set(guard.props) - set(occ.universe)
    if unknown:
        raise StructuralError(f"guard of {binding.spec_transition} uses unknown {sorted(unknown)}")
    if guard.is_true:
        return True
    return guard_admits(guard, occ)
