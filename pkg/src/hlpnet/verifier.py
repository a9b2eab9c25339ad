"""Independent checks: optimal search over the product, trace replay, and a
finite-trace evaluator for the LTL fragment."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from hlpnet.environment import Environment
from hlpnet.errors import HLPNError, StateBoundExceeded
from hlpnet.gef import Binding, gef
from hlpnet.ltl import Eventually, Formula, Lit, Until
from hlpnet.multiset import Bag
from hlpnet.robot_net import RobotOPN
from hlpnet.simulator import SYNC_STEPS, TOTAL_MOVES, Trace
from hlpnet.spec_net import SpecOPN
from hlpnet.system import HLPNState, enabled_bindings, fire_binding, initial_state

DEFAULT_MAX_STATES = 10**6


@dataclass
class OracleResult:
    optimum: int
    witness: list[Binding]
    metric: str
    explored: int

    def to_json(self) -> dict:
        return {
            "optimum": self.optimum,
            "metric": self.metric,
            "explored": self.explored,
            "witness": [
                {"spec_t": b.spec_transition, "moves": b.moves_dict()} for b in self.witness
            ],
        }


def product_bound(robots: Sequence[RobotOPN], spec: SpecOPN) -> int:
    n = len(spec.places)
    for r in robots:
        n *= len(r.places)
    return n


def _path(parents, key) -> list[Binding]:
    out = []
    while parents[key] is not None:
        key, b = parents[key]
        out.append(b)
    out.reverse()
    return out


def bfs_optimum(
    env: Environment,
    robots: Sequence[RobotOPN],
    spec: SpecOPN,
    metric: str = SYNC_STEPS,
    max_states: int = DEFAULT_MAX_STATES,
) -> OracleResult | None:
    """True optimum over all licensed bindings, or ``None`` if no final place is reachable.

    Synchronized steps: breadth-first search.  Total moves: Dijkstra with the
    binding arity as edge cost.  Raises :class:`StateBoundExceeded` once more
    than ``max_states`` product states have been visited.
    """
    start = initial_state(env, robots, spec)
    if metric == SYNC_STEPS:
        return _bfs(start, env, max_states)
    if metric == TOTAL_MOVES:
        return _dijkstra(start, env, max_states)
    raise ValueError(f"unknown metric {metric!r}")


def _bfs(start: HLPNState, env: Environment, max_states: int) -> OracleResult | None:
    parents = {start.key(): None}
    if start.final:
        return OracleResult(0, [], SYNC_STEPS, 1)
    queue = deque([(start, 0)])
    while queue:
        state, depth = queue.popleft()
        for b in enabled_bindings(state, env):
            nxt = fire_binding(state, b, env)
            k = nxt.key()
            if k in parents:
                continue
            parents[k] = (state.key(), b)
            if nxt.final:
                return OracleResult(depth + 1, _path(parents, k), SYNC_STEPS, len(parents))
            if len(parents) > max_states:
                raise StateBoundExceeded(f"more than {max_states} product states")
            queue.append((nxt, depth + 1))
    return None


def _dijkstra(start: HLPNState, env: Environment, max_states: int) -> OracleResult | None:
    dist = {start.key(): 0}
    parents = {start.key(): None}
    states = {start.key(): start}
    done = set()
    heap = [(0, 0, start.key())]
    counter = 1
    while heap:
        cost, _, k = heapq.heappop(heap)
        if k in done:
            continue
        done.add(k)
        state = states[k]
        if state.final:
            return OracleResult(cost, _path(parents, k), TOTAL_MOVES, len(dist))
        for b in enabled_bindings(state, env):
            nxt = fire_binding(state, b, env)
            nk = nxt.key()
            c = cost + b.arity
            if nk in dist and dist[nk] <= c:
                continue
            dist[nk] = c
            parents[nk] = (k, b)
            states[nk] = nxt
            if len(dist) > max_states:
                raise StateBoundExceeded(f"more than {max_states} product states")
            heapq.heappush(heap, (c, counter, nk))
            counter += 1
    return None


def replay(
    trace: Trace, env: Environment, robots: Sequence[RobotOPN], spec: SpecOPN
) -> bool:
    """Re-execute ``trace``: every step must be licensed and reproduce the
    recorded state, and the last state must be final."""
    try:
        state = initial_state(env, robots, spec)
        for step in trace.steps:
            if not gef(state, step.binding, env):
                return False
            state = fire_binding(state, step.binding, env)
            if step.spec_place is not None and step.spec_place != state.spec.marking:
                return False
            if step.occupancy is not None and step.occupancy != state.occupancy:
                return False
        return state.final
    except HLPNError:
        return False


def observations(trace: Trace, env: Environment, robots: Sequence[RobotOPN], spec: SpecOPN) -> list[frozenset]:
    """Observation sequence of a trace; position 0 is the initial occupancy."""
    start = initial_state(env, robots, spec)
    return [_true_props(start.occupancy)] + [_true_props(s.occupancy) for s in trace.steps]


def _true_props(obs) -> frozenset:
    if isinstance(obs, Bag):
        return frozenset(p for p, n in obs.items() if n >= 1)
    return frozenset(obs)


def eval_ltl(formula: Formula, trace: Iterable) -> bool:
    """Finite-trace semantics of the fragment.

    Positions are sets of true propositions (or occupancy bags).  A bare
    literal must hold at position 0, ``F l`` at some position, and ``a U b``
    needs a position where ``b`` holds with ``a`` holding everywhere before.
    """
    word = [_true_props(o) for o in trace]
    if not word:
        raise ValueError("observation trace must contain the initial position")

    def lit(l: Lit, i: int) -> bool:
        return (l.prop in word[i]) == l.positive

    def term(t) -> bool:
        if isinstance(t, Lit):
            return lit(t, 0)
        if isinstance(t, Eventually):
            return any(lit(t.arg, i) for i in range(len(word)))
        if isinstance(t, Until):
            for j in range(len(word)):
                if lit(t.right, j):
                    return True
                if not lit(t.left, j):
                    return False
            return False
        raise TypeError(f"not a fragment term: {t!r}")

    return all(term(t) for t in formula.terms)
