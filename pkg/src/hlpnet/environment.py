"""Static world model: regions of interest, partition cells, adjacency."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from hlpnet.errors import StructuralError
from hlpnet.guards import Guard
from hlpnet.multiset import Bag


@dataclass(frozen=True)
class Region:
    id: str
    prop: str


@dataclass(frozen=True)
class Cell:
    id: str
    regions: tuple[str, ...]
    capacity: int


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class Environment:
    """Regions, cells and the move relation between cells.

    Cells carry the set of regions covering them and a robot capacity.
    Exactly one cell is covered by the free-space region alone, and its
    capacity equals the team size.
    """

    regions: tuple[Region, ...]
    free_region: str
    cells: tuple[Cell, ...]
    adjacency: frozenset[frozenset[str]]
    team_size: int
    _region_by_id: dict = field(init=False, repr=False, compare=False)
    _cell_by_id: dict = field(init=False, repr=False, compare=False)
    _labels: dict = field(init=False, repr=False, compare=False)
    _neighbours: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(
            self, "adjacency", frozenset(frozenset(pair) for pair in self.adjacency)
        )
        object.__setattr__(self, "_region_by_id", {r.id: r for r in self.regions})
        object.__setattr__(self, "_cell_by_id", {c.id: c for c in self.cells})
        order = {r.id: i for i, r in enumerate(self.regions)}
        labels = {}
        for c in self.cells:
            props = [
                self._region_by_id[r].prop
                for r in sorted(c.regions, key=lambda r: order.get(r, len(order)))
                if r in self._region_by_id
            ]
            labels[c.id] = props
        object.__setattr__(self, "_labels", labels)
        nbrs: dict[str, list[str]] = {c.id: [] for c in self.cells}
        cell_order = {c.id: i for i, c in enumerate(self.cells)}
        for pair in self.adjacency:
            if len(pair) != 2:
                continue
            a, b = tuple(pair)
            if a in nbrs and b in nbrs:
                nbrs[a].append(b)
                nbrs[b].append(a)
        for k in nbrs:
            nbrs[k].sort(key=cell_order.__getitem__)
        object.__setattr__(self, "_neighbours", {k: tuple(v) for k, v in nbrs.items()})

    @property
    def props(self) -> tuple[str, ...]:
        return tuple(r.prop for r in self.regions)

    @property
    def cell_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.cells)

    @property
    def free_prop(self) -> str:
        return self._region_by_id[self.free_region].prop

    @property
    def free_cell(self) -> str:
        for c in self.cells:
            if tuple(c.regions) == (self.free_region,):
                return c.id
        raise StructuralError("environment has no free-space cell")

    def cell(self, cell_id: str) -> Cell:
        try:
            return self._cell_by_id[cell_id]
        except KeyError:
            raise StructuralError(f"unknown cell {cell_id!r}") from None

    def has_cell(self, cell_id: str) -> bool:
        return cell_id in self._cell_by_id

    def cell_props(self, cell_id: str) -> list[str]:
        """Propositions true for a robot standing in ``cell_id``."""
        if cell_id not in self._labels:
            raise StructuralError(f"unknown cell {cell_id!r}")
        return self._labels[cell_id]

    def neighbours(self, cell_id: str) -> tuple[str, ...]:
        if cell_id not in self._neighbours:
            raise StructuralError(f"unknown cell {cell_id!r}")
        return self._neighbours[cell_id]

    def adjacent(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.adjacency

    def capacities(self) -> Bag:
        return Bag(self.cell_ids, {c.id: c.capacity for c in self.cells if c.capacity > 0})

    def empty_occupancy(self) -> Bag:
        return Bag(self.props)


def validate(env: Environment) -> list[Violation]:
    """Check every environment invariant; one violation per breach."""
    out: list[Violation] = []
    region_ids = [r.id for r in env.regions]
    props = [r.prop for r in env.regions]
    if len(set(region_ids)) != len(region_ids):
        out.append(Violation("duplicate-region", "region ids are not unique"))
    if len(set(props)) != len(props):
        out.append(Violation("duplicate-prop", "propositions are not unique"))
    cell_ids = [c.id for c in env.cells]
    if len(set(cell_ids)) != len(cell_ids):
        out.append(Violation("duplicate-cell", "cell ids are not unique"))
    if env.free_region not in region_ids:
        out.append(Violation("unknown-free-region", f"free region {env.free_region!r} is not declared"))
    if not isinstance(env.team_size, int) or env.team_size < 1:
        out.append(Violation("bad-team-size", f"team size must be positive, got {env.team_size!r}"))

    for c in env.cells:
        if not c.regions:
            out.append(Violation("empty-region-set", f"cell {c.id} covers no region"))
        unknown = [r for r in c.regions if r not in region_ids]
        if unknown:
            out.append(Violation("unknown-region", f"cell {c.id} references {unknown}"))
        if len(set(c.regions)) != len(c.regions):
            out.append(Violation("duplicate-region-in-cell", f"cell {c.id} lists a region twice"))
        if not isinstance(c.capacity, int) or c.capacity < 1:
            out.append(Violation("bad-capacity", f"cell {c.id} has capacity {c.capacity!r}"))

    free_cells = [c for c in env.cells if tuple(c.regions) == (env.free_region,)]
    mixed = [c.id for c in env.cells if env.free_region in c.regions and len(c.regions) > 1]
    for cid in mixed:
        out.append(Violation("free-region-overlap", f"free region also covers cell {cid}"))
    if len(free_cells) > 1 or (not free_cells and not mixed):
        out.append(
            Violation("free-cell-count", f"expected exactly one free-space cell, found {len(free_cells)}")
        )
    if len(free_cells) == 1 and free_cells[0].capacity != env.team_size:
        out.append(
            Violation(
                "free-capacity",
                f"free-space cell {free_cells[0].id} must hold the whole team "
                f"({env.team_size}), has {free_cells[0].capacity}",
            )
        )

    known = set(cell_ids)
    for pair in env.adjacency:
        members = sorted(pair)
        if len(members) != 2:
            out.append(Violation("self-adjacency", f"cell {members[0]} is adjacent to itself"))
        elif not set(members) <= known:
            out.append(Violation("unknown-adjacency", f"adjacency {members} references unknown cells"))
    return out


def check(env: Environment) -> Environment:
    """Raise on the first batch of violations, return ``env`` otherwise."""
    problems = validate(env)
    if problems:
        raise StructuralError("invalid environment: " + "; ".join(map(str, problems)))
    return env


def cell_label(env: Environment, cell_id: str) -> Guard:
    """Characteristic conjunction of the regions covering a cell."""
    return Guard.conj(*env.cell_props(cell_id))


def occupancy_of(env: Environment, placement: Mapping[str, str]) -> Bag:
    """Robots per proposition; an overlap cell counts toward every covering region."""
    counts: dict[str, int] = {}
    for cell_id in placement.values():
        for prop in env.cell_props(cell_id):
            counts[prop] = counts.get(prop, 0) + 1
    return Bag(env.props, counts)


def cell_occupancy(env: Environment, placement: Mapping[str, str]) -> Bag:
    """Robots per cell."""
    for cell_id in placement.values():
        env.cell(cell_id)
    return Bag.from_iterable(env.cell_ids, placement.values())
