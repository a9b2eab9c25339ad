"""Random small instances and a naive, placement-level step evaluator.

The evaluator works from raw region/cell data and never calls into the
library's occupancy or guard code, so it can serve as an oracle for both.
"""

import itertools
import random

from hlpnet.environment import Cell, Environment, Region
from hlpnet.guards import Guard
from hlpnet.robot_net import build_robot_net
from hlpnet.spec_net import SpecOPN, SpecTransition
from hlpnet.system import initial_state


def small_env(n_props=3, team_size=1, extra_cells=()):
    """Free cell ``free`` plus one cell per proposition, all joined to ``free``."""
    regions = [Region(f"y{i}", f"b{i}") for i in range(1, n_props + 1)]
    regions.append(Region("yf", "bf"))
    cells = [Cell("free", ("yf",), team_size)]
    cells += [Cell(f"c{i}", (f"y{i}",), team_size) for i in range(1, n_props + 1)]
    cells += list(extra_cells)
    adjacency = {frozenset(("free", c.id)) for c in cells if c.id != "free"}
    return Environment(tuple(regions), "yf", tuple(cells), frozenset(adjacency), team_size)


def random_guard(rng, props, p_true=0.2):
    if rng.random() < p_true:
        return Guard(())
    lits = []
    for p in props:
        r = rng.random()
        if r < 0.3:
            lits.append((p, True))
        elif r < 0.5:
            lits.append((p, False))
    return Guard(tuple(lits))


def random_instance(rng, max_robots=3, max_cells=6, max_regions=4):
    k = rng.randint(1, max_regions - 1)
    regions = [Region(f"y{i}", f"b{i}") for i in range(1, k + 1)] + [Region("yf", "bf")]
    n = rng.randint(1, max_robots)
    m = rng.randint(2, max_cells)
    cells = [Cell("pf", ("yf",), n)]
    for j in range(1, m):
        cover = tuple(r.id for r in regions[:k] if rng.random() < 0.5) or (rng.choice(regions[:k]).id,)
        cells.append(Cell(f"p{j}", cover, rng.randint(1, 2)))
    ids = [c.id for c in cells]
    adjacency = {frozenset(pair) for pair in itertools.combinations(ids, 2) if rng.random() < 0.5}
    env = Environment(tuple(regions), "yf", tuple(cells), frozenset(adjacency), n)

    caps = {c.id: c.capacity for c in cells}
    used = {c: 0 for c in ids}
    robots = []
    for i in range(n):
        allowed = {"pf"} | {c for c in ids if rng.random() < 0.7}
        start = rng.choice(sorted(allowed))
        if used[start] >= caps[start]:
            start = "pf"
        used[start] += 1
        robots.append(build_robot_net(env, f"r{i + 1}", allowed, start))

    props = env.props
    n_places = rng.randint(1, 3)
    places = tuple(f"s{i}" for i in range(n_places))
    transitions = []
    for i in range(rng.randint(1, 5)):
        src = rng.choice(places)
        dst = rng.choice(places)
        transitions.append(SpecTransition(f"u{i}", src, dst, random_guard(rng, props)))
    spec = SpecOPN(places, frozenset({places[-1]}), tuple(transitions), places[0])
    return env, robots, spec


def random_state(rng, max_robots=3, max_cells=6, max_regions=4):
    env, robots, spec = random_instance(rng, max_robots, max_cells, max_regions)
    # move the mission token somewhere with outgoing arcs when possible
    sources = sorted({t.src for t in spec.transitions})
    spec = spec.with_marking(rng.choice(sources))
    spec.initial = spec.marking
    return env, robots, spec, initial_state(env, robots, spec)


def naive_verdict(env, placement, moves_to, guard):
    """Judge a step by materializing the full post-move placement.

    ``placement`` maps robot to cell, ``moves_to`` maps moving robots to their
    destination cell.
    """
    after = dict(placement)
    after.update(moves_to)
    for cell in env.cells:
        here = sum(1 for c in after.values() if c == cell.id)
        if here > cell.capacity:
            return False
    covering = {}
    for cell in env.cells:
        covering[cell.id] = set(cell.regions)
    for prop, positive in guard.literals:
        region = next(r.id for r in env.regions if r.prop == prop)
        observed = any(region in covering[c] for c in after.values())
        if observed != positive:
            return False
    return True


def brute_force_bindings(env, state):
    """Every (mission transition, robot moves) pair the naive evaluator accepts."""
    spec = state.spec
    placement = {r.robot_id: r.gamma[r.marking] for r in state.robots}
    options = []
    for r in state.robots:
        outs = [None] + [t for t in r.transitions if t.src == r.marking]
        options.append(outs)
    found = set()
    for t in spec.transitions:
        if t.src != spec.marking:
            continue
        for choice in itertools.product(*options):
            moves = {
                r.robot_id: mv for r, mv in zip(state.robots, choice) if mv is not None
            }
            if not moves:
                continue
            moves_to = {rid: next(x for x in state.robots if x.robot_id == rid).gamma[mv.dst]
                        for rid, mv in moves.items()}
            if naive_verdict(env, placement, moves_to, t.guard):
                found.add((t.id, tuple(sorted((rid, mv.id) for rid, mv in moves.items()))))
    return found
