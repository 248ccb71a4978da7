import pytest
from hypothesis import given, settings, strategies as st

from stsembed.core import LeaveGraph, PartialSTS, glued_union, leave_graph
from stsembed.embedding import (AmalgamationProblem, amalgamate, check_witness,
                                find_good_witness, padding_order, plan_embedding, run_embedding,
                                six_cycle_decomposition)
from stsembed.errors import BadDegrees, BadEdgeCount, OverlapNotSubsystem, WitnessInvalid
from stsembed.fileformat import loads
from stsembed.generators import (partial_with_hexagon_leave, projective_triple_system,
                                 random_partial, skolem)
from stsembed.subsystems import is_subsystem_free, new_subsystem_violations

FANO = projective_triple_system(2)
PG3 = projective_triple_system(3)


def complete_leave(n):
    return leave_graph(PartialSTS(n))


def test_padding_examples():
    assert padding_order(7, "odd", 15) == 15
    assert padding_order(13, 24) == 13
    assert padding_order(14, "even") == 21
    assert padding_order(5, 0) == 13
    assert padding_order(13, 1) == 15


@given(st.integers(0, 200), st.integers(0, 500), st.integers(0, 300))
def test_padding_is_minimal_and_congruent(u, blocks, lower):
    n = padding_order(u, blocks, lower)
    residues = (3, 7) if blocks % 2 else (1, 9)
    assert n % 12 in residues and n >= max(u, lower, 13)
    assert all(m % 12 not in residues for m in range(max(u, lower, 13), n))
    # the padded leave then has an edge count divisible by six
    assert (n * (n - 1) // 2 - 3 * blocks) % 6 == 0


def test_decomposition_of_a_single_hexagon():
    hexagon = LeaveGraph(6, frozenset((i, (i + 1) % 6) if i < 5 else (0, 5) for i in range(6)))
    cycles = six_cycle_decomposition(hexagon)
    assert len(cycles) == 1
    assert set(cycles[0].edges()) == set(hexagon.edges)


def test_decomposition_rejects_bad_leaves():
    with pytest.raises(BadEdgeCount):
        six_cycle_decomposition(complete_leave(7))
    with pytest.raises(BadDegrees):
        six_cycle_decomposition(complete_leave(4))


def test_k13_splits_into_thirteen_hexagons():
    L = complete_leave(13)
    cycles = six_cycle_decomposition(L)
    assert len(cycles) == 13
    seen = [e for h in cycles for e in h.edges()]
    assert len(seen) == len(set(seen)) == 78
    assert set(seen) == set(L.edges)


def test_plan_examples():
    plan = plan_embedding(PartialSTS(13))
    assert (plan.padded_order, plan.t) == (13, 13)
    glued = glued_union(FANO, FANO, {0: 0, 1: 1, 2: 2})
    plan = plan_embedding(glued)
    assert (plan.padded_order, plan.t) == (15, 11)
    assert plan.order_after(0) == 15
    assert plan.order_after(1) == 31


@given(st.integers(1, 8), st.integers(13, 60))
def test_order_formula_matches_iterated_doubling(k, u):
    plan_order = u
    for _ in range(k):
        plan_order = 2 * plan_order + 1
    assert plan_order == u * 2 ** k + 2 ** k - 1


@pytest.fixture(scope="module")
def hex13():
    return partial_with_hexagon_leave(13, seed=0)


def test_single_hexagon_leave_completes_in_one_step(hex13):
    plan = plan_embedding(hex13)
    assert plan.t == 1
    run = run_embedding(plan)
    assert run.status == "complete" and run.certified
    assert run.current.order == 27 and run.current.is_complete
    assert run.final_violations == []


def test_step_limit_zero_returns_padded_input():
    ps = random_partial(9, 3, fill=0.4)
    plan = plan_embedding(ps)
    run = run_embedding(plan, step_limit=0)
    assert run.steps == 0 and run.status == "truncated"
    assert run.current == plan.padded


def test_leave_shrinks_one_hexagon_per_step():
    plan = plan_embedding(glued_union(FANO, FANO, {0: 0, 1: 1, 2: 2}))
    run = run_embedding(plan, step_limit=2, verify="full")
    assert run.steps == 2 and run.status == "truncated"
    assert [c.output_order for c in run.certificates] == [31, 63]
    remaining = {e for h in plan.cycles[2:] for e in h.edges()}
    assert set(run.current.leave_edges()) == remaining
    assert all(c.verified and not c.failures for c in run.certificates)


def test_out_dir_files(tmp_path, hex13):
    run = run_embedding(plan_embedding(hex13), out_dir=tmp_path, name="h")
    assert run.status == "complete"
    step = loads((tmp_path / "h.step1.sts").read_text())
    assert step == run.current
    certs = (tmp_path / "h.cert").read_text().splitlines()
    assert len(certs) == 1 and certs[0].startswith("cert doubling u=13 ")
    assert certs[0].endswith("verified=1 ok=1")


def test_order_cap_truncates():
    plan = plan_embedding(glued_union(FANO, FANO, {0: 0, 1: 1, 2: 2}))
    run = run_embedding(plan, step_limit=5, max_order=40)
    assert run.steps == 1 and run.status == "truncated" and "order cap" in run.reason


@given(st.integers(0, 10 ** 6))
@settings(max_examples=8)
def test_embedding_preserves_input_and_adds_no_subsystems(seed):
    ps = random_partial(9, seed, fill=0.5)
    plan = plan_embedding(ps, seed=seed)
    run = run_embedding(plan, step_limit=1, seed=seed)
    out = run.current
    assert set(ps.blocks) <= set(out.blocks)
    assert run.certified
    if run.status == "complete":
        assert new_subsystem_violations(out, ps) == []


def test_overlap_must_be_a_subsystem():
    with pytest.raises(OverlapNotSubsystem):
        amalgamate(AmalgamationProblem(FANO, FANO, {0: 0, 1: 1, 3: 3}))
    with pytest.raises(OverlapNotSubsystem):
        # a block of the left side sent onto a non-block of the right side
        amalgamate(AmalgamationProblem(FANO, FANO, {0: 0, 1: 1, 2: 3}))


def test_witness_checks():
    with pytest.raises(WitnessInvalid):
        check_witness(PG3, [])
    with pytest.raises(WitnessInvalid):
        check_witness(random_partial(13, 0, fill=0.5), [])
    with pytest.raises(WitnessInvalid):
        check_witness(skolem(13), [skolem(13)])
    check_witness(skolem(13), [PG3])


@pytest.mark.parametrize("forbidden", [[PG3], [FANO], [skolem(13)]], ids=["pg3", "fano", "s13"])
def test_find_good_witness(forbidden):
    w = find_good_witness(forbidden)
    assert w.is_complete and is_subsystem_free(w)
    check_witness(w, forbidden)
    if forbidden[0].order == 13:
        assert w.order > 13 or w != forbidden[0]


def test_amalgamation_one_step_keeps_inputs():
    res = amalgamate(AmalgamationProblem(FANO, FANO, {0: 0, 1: 1, 2: 2}, [PG3]))
    assert res.union.order == 11 + 13
    assert res.embedding.plan.padded_order == 27
    assert res.step_checks and all(c["ok"] for c in res.step_checks)
    assert res.status == "truncated"

