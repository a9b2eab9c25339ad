"""A co-safe LTL fragment and its compilation into a mission net.

Grammar (whitespace-insensitive)::

    formula ::= term ('&' term)*
    term    ::= 'F' lit | lit 'U' lit | lit | '(' formula ')'
    lit     ::= prop | '!' lit | '(' lit ')'

Propositions are evaluated team-wide: ``b`` holds at a position when at
least one robot is in the corresponding region.  Position 0 is the initial
placement; every later position is the occupancy after one synchronized step.
``a U b`` is discharged at the first position where ``b`` holds, provided
``a`` held at every earlier position.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass
from typing import Collection, Iterable, Sequence, Union

from hlpnet.errors import LTLSyntaxError, StateBoundExceeded
from hlpnet.guards import conjoin
from hlpnet.spec_net import SpecOPN, SpecTransition


@dataclass(frozen=True)
class Lit:
    prop: str
    positive: bool = True

    def holds(self, obs: Collection[str]) -> bool:
        return (self.prop in obs) == self.positive

    @property
    def literal(self) -> tuple[str, bool]:
        return (self.prop, self.positive)

    def __str__(self) -> str:
        return self.prop if self.positive else f"!{self.prop}"


@dataclass(frozen=True)
class Eventually:
    arg: Lit

    def __str__(self) -> str:
        return f"F {self.arg}"


@dataclass(frozen=True)
class Until:
    left: Lit
    right: Lit

    def __str__(self) -> str:
        return f"({self.left} U {self.right})"


Term = Union[Lit, Eventually, Until]


@dataclass(frozen=True)
class Formula:
    terms: tuple[Term, ...]

    @property
    def props(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for t in self.terms:
            for lit in _lits(t):
                seen.setdefault(lit.prop)
        return tuple(seen)

    def __str__(self) -> str:
        return " & ".join(map(str, self.terms))


def _lits(term: Term) -> tuple[Lit, ...]:
    if isinstance(term, Lit):
        return (term,)
    if isinstance(term, Eventually):
        return (term.arg,)
    return (term.left, term.right)


_KEYWORDS = {"F", "U"}
_UNSUPPORTED = {"G", "X", "R", "W", "M", "O", "H", "Y"}
_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><>|->|<->|[!&()|~\[\]]))")


def _tokenize(text: str):
    toks = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise LTLSyntaxError(f"unexpected character {text[bad]!r}", bad, text)
        if m.group("id") is not None:
            toks.append(("id", m.group("id"), m.start("id")))
        else:
            op = m.group("op")
            toks.append(("op", "!" if op == "~" else op, m.start("op")))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, props: Collection[str] | None):
        self.text = text
        self.props = None if props is None else set(props)
        self.toks = _tokenize(text)
        self.i = 0

    def error(self, message, tok=None):
        tok = tok if tok is not None else self.peek()
        pos = tok[2] if tok else len(self.text)
        raise LTLSyntaxError(message, pos, self.text)

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of formula")
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.peek()
        if tok is None or tok[1] != value:
            self.error(f"expected {value!r}")
        return self.take()

    def parse(self) -> Formula:
        if not self.toks:
            self.error("empty formula")
        terms = self.conj()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()[1]!r}")
        return Formula(tuple(terms))

    def conj(self) -> list[Term]:
        terms = self.term()
        while self.peek() is not None and self.peek()[1] == "&":
            self.take()
            terms += self.term()
        return terms

    def term(self) -> list[Term]:
        tok = self.peek()
        if tok is None:
            self.error("expected a term")
        kind, value, _ = tok
        if kind == "id" and value == "F":
            self.take()
            return [Eventually(self.lit("F applies to literals only"))]
        if kind == "op" and value == "<>":
            self.take()
            return [Eventually(self.lit("<> applies to literals only"))]
        if kind == "op" and value == "(":
            self.take()
            inner = self.conj()
            self.expect(")")
            if self._at_until():
                if len(inner) != 1 or not isinstance(inner[0], Lit):
                    self.error("U takes literals on both sides")
                return [self.until_tail(inner[0])]
            return inner
        left = self.lit("expected a literal")
        if self._at_until():
            return [self.until_tail(left)]
        return [left]

    def _at_until(self) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "id" and tok[1] == "U"

    def until_tail(self, left: Lit) -> Until:
        self.take()
        return Until(left, self.lit("U takes literals on both sides"))

    def lit(self, message) -> Lit:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of formula")
        kind, value, _ = tok
        if kind == "op" and value == "!":
            self.take()
            inner = self.lit("negation applies to propositions only")
            return Lit(inner.prop, not inner.positive)
        if kind == "op" and value == "(":
            self.take()
            inner = self.lit(message)
            self.expect(")")
            return inner
        if kind == "id":
            if value in _UNSUPPORTED:
                self.error(f"operator {value} is outside the supported co-safe fragment")
            if value in _KEYWORDS:
                self.error(message)
            if self.props is not None and value not in self.props:
                self.error(f"unknown proposition {value!r}")
            self.take()
            return Lit(value)
        if kind == "op" and value in ("|", "->", "<->", "[", "]"):
            self.error(f"operator {value!r} is outside the supported co-safe fragment")
        self.error(message)


def parse_formula(text: str, props: Collection[str] | None = None) -> Formula:
    """Parse ``text``; when ``props`` is given, every proposition must be in it."""
    return _Parser(text, props).parse()


# Per-term automaton.  Each pending term either stays pending or is
# discharged; the literals below are what the step's observation must satisfy.

PENDING, DONE, DEAD = "pending", "done", "dead"


def _initial_status(term: Term, obs0: Collection[str]) -> str:
    if isinstance(term, Lit):
        return DONE if term.holds(obs0) else DEAD
    if isinstance(term, Eventually):
        return DONE if term.arg.holds(obs0) else PENDING
    if term.right.holds(obs0):
        return DONE
    return PENDING if term.left.holds(obs0) else DEAD


def _stay(term: Term) -> tuple[tuple[str, bool], ...]:
    if isinstance(term, Until):
        return (term.left.literal,)
    return ()


def _discharge(term: Term) -> tuple[tuple[str, bool], ...]:
    if isinstance(term, Eventually):
        return (term.arg.literal,)
    return (term.right.literal,)


def compile_to_specopn(
    formula: Formula,
    env=None,
    *,
    initial_observation: Iterable[str] | None = None,
    prop_order: Sequence[str] | None = None,
    max_states: int = 10_000,
) -> SpecOPN:
    """Compile ``formula`` into a mission net.

    The initial observation defaults to "only the free-space proposition
    holds" (the whole team in free space), which needs ``env``.  Places are
    named ``q0, q1, ...`` in breadth-first discovery order; the place in
    which every term is discharged is the single final place.
    """
    if prop_order is None:
        prop_order = env.props if env is not None else sorted(formula.props)
    if initial_observation is None:
        if env is None:
            raise ValueError("initial_observation is required without an environment")
        initial_observation = {env.free_prop}
    obs0 = frozenset(initial_observation)

    terms = tuple(dict.fromkeys(formula.terms))
    start = tuple(_initial_status(t, obs0) for t in terms)
    accept = tuple(DONE for _ in terms)

    names: dict[tuple, str] = {start: "q0"}
    order = [start]
    edges: list[tuple[tuple, tuple, tuple]] = []
    queue = deque([start])
    while queue:
        state = queue.popleft()
        if DEAD in state or state == accept:
            continue
        pending = [i for i, s in enumerate(state) if s == PENDING]
        for k in range(len(pending) + 1):
            for chosen in itertools.combinations(pending, k):
                lits = []
                for i in pending:
                    lits.extend(_discharge(terms[i]) if i in chosen else _stay(terms[i]))
                guard = conjoin(lits)
                if guard is None:
                    continue
                # a term left pending although its discharge literal is already
                # required: the edge that also discharges it fires on at least
                # the same observations and leads to a stronger state
                have = set(guard.literals)
                if any(
                    set(_discharge(terms[i])) <= have for i in pending if i not in chosen
                ):
                    continue
                nxt = tuple(DONE if i in chosen else s for i, s in enumerate(state))
                if nxt not in names:
                    if len(names) >= max_states:
                        raise StateBoundExceeded(
                            f"formula automaton exceeds {max_states} states"
                        )
                    names[nxt] = f"q{len(names)}"
                    order.append(nxt)
                    queue.append(nxt)
                edges.append((state, nxt, guard.canonical(prop_order)))

    if accept not in names:
        names[accept] = f"q{len(names)}"
        order.append(accept)
    transitions = tuple(
        SpecTransition(f"t{i}", names[src], names[dst], g) for i, (src, dst, g) in enumerate(edges)
    )
    places = tuple(names[s] for s in order)
    return SpecOPN(places, frozenset({names[accept]}), transitions, "q0")
