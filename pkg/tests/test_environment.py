import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hlpnet.environment import cell_label, cell_occupancy, occupancy_of, validate
from hlpnet.errors import StructuralError
from hlpnet.guards import Guard
from hlpnet.multiset import Bag


def test_case_study_is_valid(case_env):
    assert validate(case_env) == []
    assert [c.capacity for c in case_env.cells] == [2, 2, 2, 3, 2]
    assert case_env.free_cell == "p4"


def _replace_cell(env, cell_id, **changes):
    cells = tuple(
        dataclasses.replace(c, **changes) if c.id == cell_id else c for c in env.cells
    )
    return dataclasses.replace(env, cells=cells)


def test_free_cell_with_extra_region(case_env):
    env = _replace_cell(case_env, "p4", regions=("y4", "y1"))
    assert [p.code for p in validate(env)] == ["free-region-overlap"]


def test_zero_capacity(case_env):
    problems = validate(_replace_cell(case_env, "p1", capacity=0))
    assert [p.code for p in problems] == ["bad-capacity"]


def test_free_capacity_must_equal_team_size(case_env):
    problems = validate(_replace_cell(case_env, "p4", capacity=2))
    assert [p.code for p in problems] == ["free-capacity"]


def test_bad_adjacency(case_env):
    env = dataclasses.replace(
        case_env, adjacency=case_env.adjacency | {frozenset(("p1", "p9")), frozenset(("p2",))}
    )
    assert sorted(p.code for p in validate(env)) == ["self-adjacency", "unknown-adjacency"]


@pytest.mark.parametrize(
    "cell, text",
    [("p2", "b2 & b3"), ("p4", "b4"), ("p1", "b1")],
)
def test_cell_label(case_env, cell, text):
    assert str(cell_label(case_env, cell)) == text


def test_cell_label_unknown(case_env):
    with pytest.raises(StructuralError):
        cell_label(case_env, "p9")


def test_occupancy_all_free(case_env):
    occ = occupancy_of(case_env, {"r1": "p4", "r2": "p4", "r3": "p4"})
    assert occ.to_dict() == {"b4": 3}


def test_occupancy_blue_path(case_env):
    occ = occupancy_of(case_env, {"r1": "p1", "r2": "p3", "r3": "p5"})
    assert occ.to_dict() == {"b1": 1, "b2": 1, "b3": 1}


def test_occupancy_overlap_counts_for_each_region(case_env):
    occ = occupancy_of(case_env, {"r1": "p2", "r2": "p4", "r3": "p4"})
    assert occ.to_dict() == {"b2": 1, "b3": 1, "b4": 2}


def test_occupancy_unknown_cell(case_env):
    with pytest.raises(StructuralError):
        occupancy_of(case_env, {"r1": "nowhere"})


CELLS = ["p1", "p2", "p3", "p4", "p5"]
placements = st.lists(st.sampled_from(CELLS), min_size=1, max_size=6).map(
    lambda cs: {f"r{i}": c for i, c in enumerate(cs)}
)


@given(placements)
def test_cell_counts_sum_to_team(case_env, placement):
    assert cell_occupancy(case_env, placement).total() == len(placement)


@given(placements, placements)
def test_occupancy_additive_over_disjoint_teams(case_env, a, b):
    b = {f"s{k}": v for k, v in b.items()}
    joint = occupancy_of(case_env, {**a, **b})
    assert joint == occupancy_of(case_env, a) + occupancy_of(case_env, b)


@pytest.mark.parametrize("cell", CELLS)
def test_label_is_conjunction_of_region_labels(case_env, cell):
    label = cell_label(case_env, cell)
    parts = [Guard.conj(r.prop) for r in case_env.regions if r.id in case_env.cell(cell).regions]
    merged = tuple(lit for g in parts for lit in g.literals)
    assert set(label.literals) == set(merged)
    # logical equivalence over every assignment of the four propositions
    props = case_env.props
    for mask in range(1 << len(props)):
        true = {p for i, p in enumerate(props) if mask >> i & 1}
        assert label.holds(true) == all(g.holds(true) for g in parts)


def test_capacities_bag(case_env):
    assert case_env.capacities() == Bag(case_env.cell_ids, {"p1": 2, "p2": 2, "p3": 2, "p4": 3, "p5": 2})
