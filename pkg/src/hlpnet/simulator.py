"""Seeded Monte-Carlo plan search over the synchronized token game."""

from __future__ import annotations

import hashlib
import math
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from hlpnet.environment import Environment
from hlpnet.gef import Binding
from hlpnet.multiset import Bag
from hlpnet.robot_net import RobotOPN
from hlpnet.spec_net import SpecOPN
from hlpnet.system import DEFAULT_BUDGET, HLPNState, enabled_bindings, fire_binding, initial_state

REACHED, STEP_LIMIT, DEADLOCK = "reached-final", "step-limit", "deadlock"
TOTAL_MOVES, SYNC_STEPS = "total-moves", "sync-steps"
METRICS = (TOTAL_MOVES, SYNC_STEPS)


def derive_seed(master_seed: int, run: int) -> int:
    """64-bit seed of run ``run``: first 8 bytes of sha256("<master>:<run>"), big-endian."""
    digest = hashlib.sha256(f"{master_seed}:{run}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class Step:
    binding: Binding
    occupancy: Bag
    spec_place: str


@dataclass
class Trace:
    steps: list[Step]
    outcome: str
    seed: int
    run: int = 0
    moves_per_robot: dict[str, int] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.outcome == REACHED

    @property
    def sync_steps(self) -> int:
        return len(self.steps)

    @property
    def total_moves(self) -> int:
        return sum(s.binding.arity for s in self.steps)

    def metric(self, name: str = TOTAL_MOVES) -> int:
        if name == TOTAL_MOVES:
            return self.total_moves
        if name == SYNC_STEPS:
            return self.sync_steps
        raise ValueError(f"unknown metric {name!r}")

    def to_json(self, metric: str = TOTAL_MOVES) -> dict:
        return {
            "run": self.run,
            "seed": self.seed,
            "outcome": self.outcome,
            "steps": [
                {
                    "spec_t": s.binding.spec_transition,
                    "moves": s.binding.moves_dict(),
                    "occupancy": s.occupancy.to_dict(),
                    "spec_place": s.spec_place,
                }
                for s in self.steps
            ],
            "metric": self.metric(metric),
            "moves_per_robot": dict(self.moves_per_robot),
        }

    @classmethod
    def from_json(cls, data: dict, props: Sequence[str]) -> Trace:
        steps = [
            Step(
                Binding.of(s["spec_t"], s["moves"]),
                Bag(props, s.get("occupancy", {})),
                s.get("spec_place"),
            )
            for s in data.get("steps", [])
        ]
        counts = data.get("moves_per_robot")
        if counts is None:
            counts = {}
            for s in steps:
                for rid, _ in s.binding.moves:
                    counts[rid] = counts.get(rid, 0) + 1
        return cls(steps, data.get("outcome", REACHED), data.get("seed", 0), data.get("run", 0), counts)


def run_once(
    env: Environment,
    robots: Sequence[RobotOPN],
    spec: SpecOPN,
    seed: int,
    max_steps: int,
    *,
    run: int = 0,
    budget: int = DEFAULT_BUDGET,
    observer: Callable[[HLPNState], None] | None = None,
) -> Trace:
    """One randomized token game, stopping at a final place, a deadlock or ``max_steps``.

    Each step draws up to ``budget`` random bindings.  If none passes the
    guard, the licensed bindings are enumerated exhaustively: an empty list is
    a genuine deadlock, otherwise one is picked uniformly.  ``observer`` is
    called with the initial state and with every state reached.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    rng = random.Random(seed)
    state = initial_state(env, robots, spec)
    steps: list[Step] = []
    counts = {rid: 0 for rid in state.robot_ids}
    outcome = STEP_LIMIT
    if observer is not None:
        observer(state)
    while True:
        if state.final:
            outcome = REACHED
            break
        if len(steps) >= max_steps:
            break
        binding = next(enabled_bindings(state, env, "sampled", rng, budget), None)
        if binding is None:
            licensed = list(enabled_bindings(state, env))
            if not licensed:
                outcome = DEADLOCK
                break
            binding = rng.choice(licensed)
        state = fire_binding(state, binding, env)
        if observer is not None:
            observer(state)
        for rid, _ in binding.moves:
            counts[rid] += 1
        steps.append(Step(binding, state.occupancy, state.spec.marking))
    return Trace(steps, outcome, seed, run, counts)


@dataclass
class BatchResult:
    best: Trace | None
    traces: list[Trace]
    summary: dict
    timing: dict


def _rank(trace: Trace, metric: str) -> tuple:
    if metric == TOTAL_MOVES:
        return (trace.total_moves, trace.sync_steps, trace.run)
    return (trace.sync_steps, trace.total_moves, trace.run)


def _timed_run(args) -> tuple[Trace, float]:
    env, robots, spec, seed, max_steps, run, budget = args
    t0 = time.perf_counter()
    trace = run_once(env, robots, spec, seed, max_steps, run=run, budget=budget)
    return trace, time.perf_counter() - t0


def run_batch(
    env: Environment,
    robots: Sequence[RobotOPN],
    spec: SpecOPN,
    master_seed: int,
    n_runs: int,
    max_steps: int,
    metric: str = TOTAL_MOVES,
    *,
    parallel: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> BatchResult:
    """Run ``n_runs`` independent games and keep the best successful trace.

    Best means smallest metric; ties go to fewer synchronized steps (or fewer
    total moves under the step metric), then to the lowest run index.
    ``summary`` depends only on the inputs and ``master_seed``; wall-clock
    figures are kept apart in ``timing``.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    # validate once up front so input errors surface before any run
    initial_state(env, robots, spec)
    jobs = [
        (env, tuple(robots), spec, derive_seed(master_seed, i), max_steps, i, budget)
        for i in range(n_runs)
    ]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_timed_run, jobs, chunksize=max(1, n_runs // (4 * parallel))))
    else:
        results = [_timed_run(j) for j in jobs]
    results.sort(key=lambda r: r[0].run)
    traces = [r[0] for r in results]
    times = [r[1] for r in results]

    ok = [t for t in traces if t.success]
    best = min(ok, key=lambda t: _rank(t, metric)) if ok else None
    histogram: dict[int, int] = {}
    for t in ok:
        v = t.metric(metric)
        histogram[v] = histogram.get(v, 0) + 1
    outcomes = {k: sum(t.outcome == k for t in traces) for k in (REACHED, STEP_LIMIT, DEADLOCK)}
    summary = {
        "runs": n_runs,
        "master_seed": master_seed,
        "metric": metric,
        "successes": len(ok),
        "success_rate": len(ok) / n_runs,
        "outcomes": outcomes,
        "histogram": {str(k): histogram[k] for k in sorted(histogram)},
        "best": None
        if best is None
        else {
            "run": best.run,
            "seed": best.seed,
            "metric": best.metric(metric),
            "sync_steps": best.sync_steps,
            "total_moves": best.total_moves,
        },
    }
    timing = {
        "mean_ms": 1000 * statistics.fmean(times),
        "std_ms": 1000 * (statistics.stdev(times) if len(times) > 1 else 0.0),
        "total_s": math.fsum(times),
    }
    return BatchResult(best, traces, summary, timing)


def format_plan(trace: Trace, env: Environment, robots: Sequence[RobotOPN]) -> str:
    """Plan in tuple notation, one line per step: ``<r1, r2> = <b1, b2∧b3>``.

    A robot that does not move in a step is shown as ``-``.
    """
    head = "⟨" + ", ".join(r.robot_id for r in robots) + "⟩"
    lines = []
    for step in trace.steps:
        moved = step.binding.moves_dict()
        cells = []
        for r in robots:
            if r.robot_id in moved:
                dst = r.gamma[r.transition(moved[r.robot_id]).dst]
                cells.append("∧".join(env.cell_props(dst)))
            else:
                cells.append("-")
        lines.append(f"{head} = ⟨" + ", ".join(cells) + "⟩")
    return "\n".join(lines)
