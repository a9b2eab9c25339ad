"""Mission nets: one-token state machines with conjunctive guards."""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from hlpnet.errors import SemanticsError, StructuralError
from hlpnet.guards import Guard, parse_dnf, parse_guard

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpecTransition:
    id: str
    src: str
    dst: str
    guard: Guard


@dataclass
class SpecOPN:
    places: tuple[str, ...]
    final_places: frozenset[str]
    transitions: tuple[SpecTransition, ...]
    marking: str
    initial: str | None = None
    _by_id: dict = field(init=False, repr=False, compare=False)
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.places = tuple(self.places)
        self.final_places = frozenset(self.final_places)
        self.transitions = tuple(self.transitions)
        if self.initial is None:
            self.initial = self.marking
        self._by_id = {t.id: t for t in self.transitions}
        out: dict[str, list[SpecTransition]] = {p: [] for p in self.places}
        for t in self.transitions:
            out.setdefault(t.src, []).append(t)
        self._out = {p: tuple(ts) for p, ts in out.items()}

    def transition(self, tid: str) -> SpecTransition:
        try:
            return self._by_id[tid]
        except KeyError:
            raise StructuralError(f"mission net has no transition {tid!r}") from None

    def has_transition(self, tid: str) -> bool:
        return tid in self._by_id

    def outgoing(self, place: str) -> tuple[SpecTransition, ...]:
        return self._out.get(place, ())

    def with_marking(self, place: str) -> SpecOPN:
        if place not in self._out:
            raise StructuralError(f"mission net has no place {place!r}")
        new = copy.copy(self)
        new.marking = place
        return new

    def marking_vector(self) -> dict[str, int]:
        return {p: int(p == self.marking) for p in self.places}

    @property
    def props(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for t in self.transitions:
            for p in t.guard.props:
                seen.setdefault(p)
        return tuple(seen)

    def same_structure(self, other: SpecOPN) -> bool:
        return (
            self.places == other.places
            and self.final_places == other.final_places
            and self.transitions == other.transitions
            and self.initial == other.initial
        )


def check_spec(net: SpecOPN) -> list[str]:
    """Hard structural problems; strong connectivity is only logged."""
    problems = []
    places = set(net.places)
    if len(places) != len(net.places):
        problems.append("duplicate place ids")
    ids = [t.id for t in net.transitions]
    if len(set(ids)) != len(ids):
        problems.append("duplicate transition ids")
    if not net.final_places:
        problems.append("no final place")
    if not net.final_places <= places:
        problems.append(f"final places {sorted(net.final_places - places)} are not places")
    if net.marking not in places:
        problems.append(f"marked place {net.marking!r} is not a place")
    for t in net.transitions:
        if t.src not in places or t.dst not in places:
            problems.append(f"transition {t.id} has a dangling arc")
    if not problems and not strongly_connected(net):
        log.warning("mission net is not strongly connected")
    return problems


def strongly_connected(net: SpecOPN) -> bool:
    if not net.places:
        return True
    fwd: dict[str, set[str]] = {p: set() for p in net.places}
    bwd: dict[str, set[str]] = {p: set() for p in net.places}
    for t in net.transitions:
        fwd[t.src].add(t.dst)
        bwd[t.dst].add(t.src)

    def reach(graph):
        start = net.places[0]
        seen = {start}
        stack = [start]
        while stack:
            for q in graph[stack.pop()]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    return len(reach(fwd)) == len(net.places) == len(reach(bwd))


def normalize_guards(
    places: Sequence[str],
    initial: str,
    final: Iterable[str],
    transitions: Iterable[tuple[str, str, str, str | Sequence[Guard]]],
    prop_order: Sequence[str] | None = None,
    max_disjuncts: int = 64,
) -> SpecOPN:
    """Build a mission net, splitting disjunctive guards into parallel transitions.

    Each raw transition is ``(id, src, dst, guard)`` where ``guard`` is text or
    a list of conjunctive disjuncts.  A transition with k > 1 disjuncts becomes
    k transitions ``id.1 .. id.k``; an unsatisfiable guard yields none.
    """
    out = []
    for tid, src, dst, guard in transitions:
        if isinstance(guard, str):
            disjuncts = parse_dnf(guard, max_disjuncts)
        else:
            disjuncts = list(guard)
            if len(disjuncts) > max_disjuncts:
                raise StructuralError(f"guard of {tid} exceeds {max_disjuncts} disjuncts")
        if prop_order is not None:
            disjuncts = [g.canonical(prop_order) for g in disjuncts]
        if len(disjuncts) == 1:
            out.append(SpecTransition(tid, src, dst, disjuncts[0]))
        else:
            for i, g in enumerate(disjuncts, 1):
                out.append(SpecTransition(f"{tid}.{i}", src, dst, g))
    net = SpecOPN(tuple(places), frozenset(final), tuple(out), initial)
    problems = check_spec(net)
    if problems:
        raise StructuralError("invalid mission net: " + "; ".join(problems))
    return net


def spec_enabled(net: SpecOPN) -> list[str]:
    """Marking-enabled transitions; guard truth is not considered."""
    return [t.id for t in net.outgoing(net.marking)]


def fire_spec(net: SpecOPN, tid: str) -> SpecOPN:
    t = net.transition(tid)
    if t.src != net.marking:
        raise SemanticsError(f"mission transition {tid} is not enabled (token in {net.marking})")
    return net.with_marking(t.dst)


def is_final(net: SpecOPN) -> bool:
    return net.marking in net.final_places


def accepts(net: SpecOPN, observations: Iterable) -> bool:
    """Whether some run of the net reaches a final place along ``observations``.

    The first observation is the initial one and fires nothing; each later
    observation fires exactly one guard-true transition.
    """
    it = iter(observations)
    next(it, None)
    current = {net.initial}
    if current & net.final_places:
        return True
    for obs in it:
        current = {t.dst for p in current for t in net.outgoing(p) if t.guard.holds(obs)}
        if current & net.final_places:
            return True
        if not current:
            return False
    return False


def spec_to_json(net: SpecOPN) -> dict:
    return {
        "places": list(net.places),
        "initial": net.initial,
        "final": [p for p in net.places if p in net.final_places],
        "transitions": [
            {"id": t.id, "from": t.src, "to": t.dst, "guard": str(t.guard)}
            for t in net.transitions
        ],
    }


def spec_from_json(data: dict, prop_order: Sequence[str] | None = None) -> SpecOPN:
    try:
        raw = [(t["id"], t["from"], t["to"], t.get("guard", "1")) for t in data["transitions"]]
        return normalize_guards(
            data["places"], data["initial"], data["final"], raw, prop_order=prop_order
        )
    except KeyError as exc:
        raise StructuralError(f"mission net JSON is missing key {exc}") from None


__all__ = [
    "Guard",
    "SpecOPN",
    "SpecTransition",
    "accepts",
    "check_spec",
    "fire_spec",
    "is_final",
    "normalize_guards",
    "parse_guard",
    "spec_enabled",
    "spec_from_json",
    "spec_to_json",
]
