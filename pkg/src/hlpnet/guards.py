"""Conjunctive Boolean guards over atomic propositions.

Text syntax: ``1`` (or ``true``) is TRUE, literals are joined by ``&`` (the
Renew-style ``,`` is accepted too) and negated with ``!``.  Disjunctions
``|`` and parentheses are understood by :func:`parse_dnf`, which returns one
conjunctive guard per disjunct.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from hlpnet.errors import StructuralError

Literal = tuple  # (proposition, polarity)


@dataclass(frozen=True)
class Guard:
    """A conjunction of literals; the empty conjunction is TRUE."""

    literals: tuple[tuple[str, bool], ...] = ()

    def __post_init__(self):
        seen = set()
        for prop, pol in self.literals:
            if prop in seen:
                raise StructuralError(f"proposition {prop!r} appears twice in one guard")
            if not isinstance(pol, bool):
                raise StructuralError(f"polarity of {prop!r} must be a bool")
            seen.add(prop)

    @classmethod
    def true(cls) -> Guard:
        return TRUE

    @classmethod
    def conj(cls, *props: str) -> Guard:
        """Positive conjunction of the given propositions."""
        return cls(tuple((p, True) for p in props))

    @property
    def is_true(self) -> bool:
        return not self.literals

    @property
    def positives(self) -> tuple[str, ...]:
        return tuple(p for p, pol in self.literals if pol)

    @property
    def negatives(self) -> tuple[str, ...]:
        return tuple(p for p, pol in self.literals if not pol)

    @property
    def props(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.literals)

    def holds(self, true_props) -> bool:
        return all((p in true_props) == pol for p, pol in self.literals)

    def canonical(self, order: Sequence[str]) -> Guard:
        """Reorder literals by ``order``; unknown propositions go last, by name."""
        rank = {p: i for i, p in enumerate(order)}
        lits = sorted(self.literals, key=lambda lit: (rank.get(lit[0], len(rank)), lit[0]))
        return Guard(tuple(lits))

    def __str__(self) -> str:
        if not self.literals:
            return "1"
        return " & ".join(p if pol else f"!{p}" for p, pol in self.literals)


TRUE = Guard(())


def conjoin(literals: Iterable[tuple[str, bool]]) -> Guard | None:
    """Merge literals into a guard; ``None`` if they are contradictory."""
    out: dict[str, bool] = {}
    for prop, pol in literals:
        if prop in out and out[prop] != pol:
            return None
        out[prop] = pol
    return Guard(tuple(out.items()))


_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>[01])|(?P<op>[!&,|()~]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise StructuralError(f"bad guard {text!r}: unexpected character at {pos}")
        if m.group("id") is not None:
            word = m.group("id")
            if word.lower() == "true":
                toks.append(("const", "1", m.start("id")))
            elif word.lower() == "false":
                toks.append(("const", "0", m.start("id")))
            else:
                toks.append(("id", word, m.start("id")))
        elif m.group("num") is not None:
            toks.append(("const", m.group("num"), m.start("num")))
        else:
            op = m.group("op")
            op = {"~": "!", ",": "&"}.get(op, op)
            toks.append(("op", op, m.start("op")))
        pos = m.end()
    return toks


class _Parser:
    # expression AST: ("const", bool) | ("var", name) | ("not", e) | ("and", [e]) | ("or", [e])

    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, value=None):
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value):
            where = tok[2] if tok else len(self.text)
            raise StructuralError(f"bad guard {self.text!r}: expected {value or 'a term'} at {where}")
        self.i += 1
        return tok

    def parse(self):
        if not self.toks:
            raise StructuralError("empty guard")
        node = self.disj()
        if self.peek() is not None:
            raise StructuralError(f"bad guard {self.text!r}: trailing input at {self.peek()[2]}")
        return node

    def disj(self):
        parts = [self.conj()]
        while self.peek() and self.peek()[1] == "|":
            self.take("|")
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else ("or", parts)

    def conj(self):
        parts = [self.unary()]
        while self.peek() and self.peek()[1] == "&":
            self.take("&")
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else ("and", parts)

    def unary(self):
        tok = self.peek()
        if tok is None:
            raise StructuralError(f"bad guard {self.text!r}: unexpected end")
        kind, value, _ = tok
        if kind == "op" and value == "!":
            self.take()
            return ("not", self.unary())
        if kind == "op" and value == "(":
            self.take()
            node = self.disj()
            self.take(")")
            return node
        if kind == "const":
            self.take()
            return ("const", value == "1")
        if kind == "id":
            self.take()
            return ("var", value)
        raise StructuralError(f"bad guard {self.text!r}: unexpected {value!r} at {tok[2]}")


def _dnf(node, positive: bool, bound: int) -> list[Guard]:
    """Disjuncts of ``node`` (negated when ``positive`` is False)."""
    kind = node[0]
    if kind == "const":
        return [TRUE] if node[1] == positive else []
    if kind == "var":
        return [Guard(((node[1], positive),))]
    if kind == "not":
        return _dnf(node[1], not positive, bound)
    parts = node[1]
    is_or = (kind == "or") == positive
    if is_or:
        out: list[Guard] = []
        for p in parts:
            out.extend(_dnf(p, positive, bound))
            if len(out) > bound:
                raise StructuralError(f"guard DNF exceeds {bound} disjuncts")
        return _dedupe(out)
    acc = [TRUE]
    for p in parts:
        sub = _dnf(p, positive, bound)
        nxt = []
        for a in acc:
            for b in sub:
                merged = conjoin(a.literals + b.literals)
                if merged is not None:
                    nxt.append(merged)
        acc = _dedupe(nxt)
        if len(acc) > bound:
            raise StructuralError(f"guard DNF exceeds {bound} disjuncts")
    return acc


def _dedupe(guards: list[Guard]) -> list[Guard]:
    seen = set()
    out = []
    for g in guards:
        key = frozenset(g.literals)
        if key not in seen:
            seen.add(key)
            out.append(g)
    return out


def parse_dnf(text: str, max_disjuncts: int = 64) -> list[Guard]:
    """Parse an arbitrary guard expression into conjunctive disjuncts.

    Contradictory disjuncts are dropped, so an unsatisfiable expression gives
    an empty list.
    """
    return _dnf(_Parser(text).parse(), True, max_disjuncts)


def parse_guard(text: str) -> Guard:
    """Parse a single conjunctive guard; disjunctions are rejected."""
    node = _Parser(text).parse()
    if _has_or(node, True):
        raise StructuralError(f"guard {text!r} is disjunctive; split it first")
    disjuncts = _dnf(node, True, 1)
    if not disjuncts:
        raise StructuralError(f"guard {text!r} is unsatisfiable")
    return disjuncts[0]


def _has_or(node, positive: bool) -> bool:
    kind = node[0]
    if kind in ("const", "var"):
        return False
    if kind == "not":
        return _has_or(node[1], not positive)
    if (kind == "or") == positive:
        return True
    return any(_has_or(p, positive) for p in node[1])


def eval_expression(text: str, true_props) -> bool:
    """Evaluate a guard expression directly, without DNF conversion."""

    def ev(node):
        kind = node[0]
        if kind == "const":
            return node[1]
        if kind == "var":
            return node[1] in true_props
        if kind == "not":
            return not ev(node[1])
        vals = [ev(p) for p in node[1]]
        return any(vals) if kind == "or" else all(vals)

    return ev(_Parser(text).parse())
