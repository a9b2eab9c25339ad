"""The system net: global state, licensed bindings, synchronized firing.

The state holds the mission net token, one robot net per robot and the
per-proposition occupancy.  A step fires one mission transition together
with the moves of a non-empty subset of robots; robots outside the subset
stay put.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from hlpnet.environment import Environment, cell_occupancy, occupancy_of
from hlpnet.errors import CapacityError, SemanticsError, StructuralError
from hlpnet.gef import Binding, capacity_ok, gef, guard_admits, simulate
from hlpnet.multiset import Bag
from hlpnet.robot_net import RobotOPN, check_robot_net, fire_move
from hlpnet.spec_net import SpecOPN, fire_spec, is_final

DEFAULT_BUDGET = 500


@dataclass(frozen=True)
class HLPNState:
    spec: SpecOPN
    robots: tuple[RobotOPN, ...]
    occupancy: Bag
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "robots", tuple(self.robots))
        object.__setattr__(self, "_index", {r.robot_id: r for r in self.robots})

    def robot(self, robot_id: str) -> RobotOPN:
        try:
            return self._index[robot_id]
        except KeyError:
            raise StructuralError(f"unknown robot {robot_id!r}") from None

    @property
    def robot_ids(self) -> tuple[str, ...]:
        return tuple(r.robot_id for r in self.robots)

    def placement(self) -> dict[str, str]:
        return {r.robot_id: r.cell for r in self.robots}

    def key(self) -> tuple:
        """Spec place plus robot cells; occupancy is derivable and left out."""
        return (self.spec.marking, tuple(r.cell for r in self.robots))

    @property
    def final(self) -> bool:
        return is_final(self.spec)


def _check_capacity(env: Environment, placement: dict[str, str]) -> None:
    chi = cell_occupancy(env, placement)
    if not capacity_ok(chi, env):
        over = [c.id for c in env.cells if chi.get(c.id) > c.capacity]
        raise CapacityError(f"placement exceeds capacity of {', '.join(over)}")


def initial_state(env: Environment, robots: Sequence[RobotOPN], spec: SpecOPN) -> HLPNState:
    ids = [r.robot_id for r in robots]
    if len(set(ids)) != len(ids):
        raise StructuralError("robot ids are not unique")
    for r in robots:
        problems = check_robot_net(r, env)
        if problems:
            raise StructuralError(f"robot {r.robot_id}: " + "; ".join(problems))
    unknown = set(spec.props) - set(env.props)
    if unknown:
        raise StructuralError(f"mission guards use unknown propositions {sorted(unknown)}")
    placement = {r.robot_id: r.cell for r in robots}
    _check_capacity(env, placement)
    if len(robots) != env.team_size:
        raise StructuralError(f"{len(robots)} robots given, environment team size is {env.team_size}")
    spec = spec.with_marking(spec.initial)
    return HLPNState(spec, tuple(robots), occupancy_of(env, placement))


def _exhaustive(state: HLPNState, env: Environment) -> Iterator[Binding]:
    spec_ts = sorted(state.spec.outgoing(state.spec.marking), key=lambda t: t.id)
    if not spec_ts:
        return
    moves = [[t.id for t in r.outgoing(r.marking)] for r in state.robots]
    ids = state.robot_ids
    n = len(state.robots)
    cache: dict[tuple, tuple[bool, Bag]] = {}
    for st in spec_ts:
        for arity in range(1, n + 1):
            for subset in itertools.combinations(range(n), arity):
                for combo in itertools.product(*(moves[i] for i in subset)):
                    b = Binding(st.id, tuple((ids[i], tid) for i, tid in zip(subset, combo)))
                    hit = cache.get(b.moves)
                    if hit is None:
                        chi, occ = simulate(state, b, env)
                        hit = cache[b.moves] = (capacity_ok(chi, env), occ)
                    if hit[0] and guard_admits(st.guard, hit[1]):
                        yield b


def _sampled(state: HLPNState, env: Environment, rng: random.Random, budget: int) -> Iterator[Binding]:
    spec_ts = sorted(state.spec.outgoing(state.spec.marking), key=lambda t: t.id)
    if not spec_ts:
        return
    robots = state.robots
    n = len(robots)
    for _ in range(budget):
        st = rng.choice(spec_ts)
        arity = rng.randint(1, n)
        subset = sorted(rng.sample(range(n), arity))
        pairs = []
        for i in subset:
            options = robots[i].outgoing(robots[i].marking)
            if not options:
                break
            pairs.append((robots[i].robot_id, rng.choice(options).id))
        else:
            b = Binding(st.id, tuple(pairs))
            if gef(state, b, env):
                yield b


def enabled_bindings(
    state: HLPNState,
    env: Environment,
    mode: str = "exhaustive",
    rng: random.Random | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Iterator[Binding]:
    """Bindings licensed by the global enabling function.

    ``exhaustive`` yields every one in canonical order: mission transitions
    by id, then arity, then robot subsets in declaration order, then moves.
    ``sampled`` draws a mission transition, an arity, a robot subset and one
    move per robot uniformly at random and yields the draws the guard
    accepts; it stops after ``budget`` draws.
    """
    if mode == "exhaustive":
        return _exhaustive(state, env)
    if mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        return _sampled(state, env, rng, budget)
    raise ValueError(f"unknown mode {mode!r}")


def fire_binding(state: HLPNState, binding: Binding, env: Environment) -> HLPNState:
    if not gef(state, binding, env):
        raise SemanticsError(f"binding {binding} is not enabled")
    spec = fire_spec(state.spec, binding.spec_transition)
    moved = binding.moves_dict()
    robots = tuple(
        fire_move(r, moved[r.robot_id]) if r.robot_id in moved else r for r in state.robots
    )
    placement = {r.robot_id: r.cell for r in robots}
    return HLPNState(spec, robots, occupancy_of(env, placement))


def check_invariants(state: HLPNState, env: Environment) -> None:
    """Capacity, token conservation and occupancy coherence; raises on breach."""
    placement = state.placement()
    _check_capacity(env, placement)
    for r in state.robots:
        if sum(r.marking_vector().values()) != 1:
            raise SemanticsError(f"robot {r.robot_id} does not hold exactly one token")
    if sum(state.spec.marking_vector().values()) != 1:
        raise SemanticsError("mission net does not hold exactly one token")
    if state.occupancy != occupancy_of(env, placement):
        raise SemanticsError("stored occupancy is out of date")
