import pytest
from hypothesis import given, settings, strategies as st

from stsembed.core import leave_graph
from stsembed.errors import BadCongruence, BadDimension
from stsembed.generators import (GeneratorSpec, affine_triple_system, bose, catalog,
                                 partial_with_hexagon_leave, projective_triple_system,
                                 random_partial, random_sts, skolem)
from stsembed.subsystems import enumerate_subsystems


@pytest.mark.parametrize("n,order,blocks", [(1, 3, 1), (2, 7, 7), (3, 15, 35), (4, 31, 155)])
def test_projective_orders(n, order, blocks):
    ps = projective_triple_system(n)
    assert ps.is_complete and (ps.order, len(ps.blocks)) == (order, blocks)


@pytest.mark.parametrize("n,order,blocks", [(1, 3, 1), (2, 9, 12), (3, 27, 117)])
def test_affine_orders(n, order, blocks):
    ps = affine_triple_system(n)
    assert ps.is_complete and (ps.order, len(ps.blocks)) == (order, blocks)


def test_dimension_checks():
    with pytest.raises(BadDimension):
        projective_triple_system(0)
    with pytest.raises(BadDimension):
        affine_triple_system(0)


def test_ag2_has_no_order_seven_subsystem():
    assert 7 not in enumerate_subsystems(affine_triple_system(2)).orders()


@pytest.mark.parametrize("v", [13, 15, 19, 21, 25, 27])
def test_classical_constructions(v):
    sts = bose(v) if v % 6 == 3 else skolem(v)
    assert sts.is_complete and sts.order == v
    for rec in enumerate_subsystems(sts).nontrivial_proper():
        assert rec.order <= (v - 1) // 2


def test_congruence_checks():
    with pytest.raises(BadCongruence):
        bose(8)
    with pytest.raises(BadCongruence):
        skolem(15)
    with pytest.raises(BadCongruence):
        partial_with_hexagon_leave(11)
    with pytest.raises(BadCongruence):
        random_sts(11)


def _is_single_hexagon(ps):
    L = leave_graph(ps)
    if len(L.edges) != 6 or sorted(L.degrees()).count(2) != 6:
        return False
    adj = L.adjacency()
    start = next(iter(adj))
    seen, stack = {start}, [start]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == 6


@pytest.mark.parametrize("v,blocks", [(13, 24), (15, 33), (19, 55), (21, 68)])
def test_hexagon_leave(v, blocks):
    ps = partial_with_hexagon_leave(v, 7)
    assert len(ps.blocks) == blocks == (v * (v - 1) // 2 - 6) // 3
    assert _is_single_hexagon(ps)


def test_hexagon_leave_with_planted_subsystem():
    ps = partial_with_hexagon_leave(15, 1, planted=projective_triple_system(2))
    assert _is_single_hexagon(ps)
    recs = enumerate_subsystems(ps).nontrivial_proper()
    assert [r.points for r in recs] == [tuple(range(7))]


@given(st.integers(0, 10 ** 6), st.sampled_from([7, 9, 13, 15, 19, 21]))
@settings(max_examples=20)
def test_random_sts_valid(seed, v):
    sts = random_sts(v, seed)
    assert sts.is_complete and sts.order == v


def test_seed_determinism():
    assert random_sts(19, 4) == random_sts(19, 4)
    assert partial_with_hexagon_leave(13, 2) == partial_with_hexagon_leave(13, 2)
    assert random_partial(12, 3, fill=0.5) == random_partial(12, 3, fill=0.5)


def test_random_partial_planting():
    fano = projective_triple_system(2)
    ps = random_partial(12, 0, fill=0.0, planted=[(fano, [11, 10, 9, 8, 7, 6, 5])])
    assert len(ps.blocks) == 7
    assert [r.points for r in enumerate_subsystems(ps).nontrivial_proper()] == [tuple(range(5, 12))]


def test_generator_spec_and_catalog():
    assert GeneratorSpec("pg", 3).build() == projective_triple_system(3)
    assert GeneratorSpec("hexleave", 13, 7).build() == partial_with_hexagon_leave(13, 7)
    with pytest.raises(ValueError):
        GeneratorSpec("nope", 3).build()
    cat = list(catalog(13, 2))
    assert len(cat) == 3 and all(s.order == 13 and s.is_complete for s in cat)
