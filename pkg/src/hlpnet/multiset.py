"""Multi-sets (bags) over finite, ordered label universes."""

from __future__ import annotations

from typing import Iterable, Mapping

from hlpnet.errors import StructuralError, UnderflowError


class Bag:
    """Immutable multi-set with non-negative integer multiplicities.

    The universe is an ordered tuple of labels; it fixes the canonical order
    used for printing and serialization.  Labels outside the universe may not
    be counted.

    >>> u = ("u1", "u2")
    >>> Bag(u, {"u1": 1, "u2": 2}) + Bag(u, {"u1": 1})
    Bag(2'u1 + 2'u2)
    """

    __slots__ = ("_universe", "_counts", "_index")

    def __init__(self, universe: Iterable[str], counts: Mapping[str, int] | None = None):
        universe = tuple(universe)
        if len(set(universe)) != len(universe):
            raise StructuralError(f"duplicate labels in universe {universe!r}")
        self._universe = universe
        self._index = frozenset(universe)
        clean = {}
        for label, n in (counts or {}).items():
            if label not in self._index:
                raise StructuralError(f"label {label!r} is not in the universe")
            if not isinstance(n, int) or isinstance(n, bool):
                raise StructuralError(f"count for {label!r} must be an int, got {n!r}")
            if n < 0:
                raise UnderflowError(f"negative count {n} for {label!r}")
            if n:
                clean[label] = n
        self._counts = clean

    @classmethod
    def empty(cls, universe: Iterable[str]) -> Bag:
        return cls(universe)

    @classmethod
    def from_iterable(cls, universe: Iterable[str], labels: Iterable[str]) -> Bag:
        """Count each occurrence of a label in ``labels``."""
        counts: dict[str, int] = {}
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
        return cls(universe, counts)

    @property
    def universe(self) -> tuple[str, ...]:
        return self._universe

    def __getitem__(self, label: str) -> int:
        if label not in self._index:
            raise StructuralError(f"label {label!r} is not in the universe")
        return self._counts.get(label, 0)

    def get(self, label: str, default: int = 0) -> int:
        return self._counts.get(label, default)

    def support(self) -> tuple[str, ...]:
        """Labels with a positive count, in universe order."""
        return tuple(u for u in self._universe if u in self._counts)

    def items(self):
        return ((u, self._counts[u]) for u in self._universe if u in self._counts)

    def total(self) -> int:
        return sum(self._counts.values())

    def _check(self, other: Bag) -> None:
        if not isinstance(other, Bag):
            raise TypeError(f"expected Bag, got {type(other).__name__}")
        if other._universe != self._universe:
            raise StructuralError(
                f"universe mismatch: {self._universe!r} vs {other._universe!r}"
            )

    def add(self, other: Bag) -> Bag:
        self._check(other)
        counts = dict(self._counts)
        for label, n in other._counts.items():
            counts[label] = counts.get(label, 0) + n
        return self._make(counts)

    def sub(self, other: Bag) -> Bag:
        self._check(other)
        counts = dict(self._counts)
        for label in self._universe:
            n = other._counts.get(label, 0)
            if not n:
                continue
            left = counts.get(label, 0) - n
            if left < 0:
                raise UnderflowError(
                    f"cannot remove {n}'{label} from a bag holding {counts.get(label, 0)}"
                )
            if left:
                counts[label] = left
            else:
                del counts[label]
        return self._make(counts)

    def leq(self, other: Bag) -> bool:
        self._check(other)
        return all(n <= other._counts.get(label, 0) for label, n in self._counts.items())

    def _make(self, counts: dict[str, int]) -> Bag:
        # counts are already validated
        new = object.__new__(Bag)
        new._universe = self._universe
        new._index = self._index
        new._counts = {k: v for k, v in counts.items() if v}
        return new

    __add__ = add
    __sub__ = sub
    __le__ = leq

    def __ge__(self, other: Bag) -> bool:
        return other.leq(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Bag):
            return NotImplemented
        return self._universe == other._universe and self._counts == other._counts

    def __hash__(self) -> int:
        return hash((self._universe, tuple(sorted(self._counts.items()))))

    def __bool__(self) -> bool:
        return bool(self._counts)

    def to_dict(self) -> dict[str, int]:
        """JSON form: ``{label: count}`` in universe order, zeros omitted."""
        return {u: self._counts[u] for u in self._universe if u in self._counts}

    @classmethod
    def from_dict(cls, universe: Iterable[str], data: Mapping[str, int]) -> Bag:
        return cls(universe, data)

    def symbolic(self) -> str:
        """Symbolic-sum notation, e.g. ``1'b1 + 2'b4``."""
        if not self._counts:
            return "0"
        return " + ".join(f"{n}'{u}" for u, n in self.items())

    def __str__(self) -> str:
        return self.symbolic()

    def __repr__(self) -> str:
        return f"Bag({self.symbolic()})"


def bag_add(a: Bag, b: Bag) -> Bag:
    return a.add(b)


def bag_sub(a: Bag, b: Bag) -> Bag:
    return a.sub(b)


def bag_leq(a: Bag, b: Bag) -> bool:
    return a.leq(b)
