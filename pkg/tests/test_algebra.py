from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from oracles import brute_sub_factorisation, explicit_one_factorisation
from stsembed.algebra import (INF, Coset, CycGroup, admissible_coset_divisors,
                              all_proper_cosets, closed_under_distinct_sums, coset_containing,
                              harmonic_bound, induced_sub_factorisation, is_subgroup,
                              standard_one_factorisation)
from stsembed.errors import BadParity, BadRange, EvenModulus

odd = st.integers(1, 15).map(lambda k: 2 * k + 1)


def test_cyclic_group_rejects_even():
    with pytest.raises(EvenModulus):
        CycGroup(8)
    assert CycGroup(15).proper_nontrivial_divisors() == [3, 5]


def test_coset_basics():
    c = Coset(15, 5, 2)
    assert c.elements == (2, 7, 12)
    assert len(c) == 3 and 7 in c and 3 not in c
    assert coset_containing(15, 3, 10) == Coset(15, 3, 1)
    assert len(all_proper_cosets(15)) == 3 + 5
    assert all_proper_cosets(13) == []


def test_standard_factor_shape():
    fac = standard_one_factorisation(7)
    assert len(fac.factors) == 7
    for i, f in enumerate(fac.factors):
        assert frozenset((7, i)) in f
        assert len(f) == 4
        assert set().union(*f) == set(range(8))
    assert fac.factor_of(1, 2) == 5  # 1 + 2 = 2 * 5 mod 7
    assert fac.factor_of(3, 7) == 3


@given(odd)
def test_factorisation_partitions_edges(n):
    fac = standard_one_factorisation(n)
    assert [set(f) for f in fac.factors] == explicit_one_factorisation(n)
    seen = set()
    for i, f in enumerate(fac.factors):
        for e in f:
            assert e not in seen
            seen.add(e)
            x, y = sorted(e)
            assert fac.factor_of(x, y) == i
    assert len(seen) == (n + 1) * n // 2


def test_sub_factorisation_examples():
    fac = standard_one_factorisation(9)
    assert induced_sub_factorisation([0, 3, 6, INF], fac) == [0, 3, 6]
    assert induced_sub_factorisation([1, 4, 7, INF], fac) == [1, 4, 7]
    assert induced_sub_factorisation([0, 1, 2, INF], fac) is None
    assert induced_sub_factorisation([0, 3, 6], fac) is None
    assert induced_sub_factorisation(list(range(9)) + [INF], fac) == list(range(9))


@given(odd, st.data())
def test_sub_factorisation_matches_oracle(n, data):
    fac = standard_one_factorisation(n)
    explicit = explicit_one_factorisation(n)
    S = data.draw(st.sets(st.integers(0, n), min_size=3, max_size=n + 1))
    assert induced_sub_factorisation(S, fac) == brute_sub_factorisation(S, explicit)


def test_subgroup_examples():
    assert is_subgroup({0, 5, 10}, 15)
    assert not is_subgroup({0, 1, 2}, 15)
    assert closed_under_distinct_sums({0, 3, 6, 9, 12}, 15)


def test_distinct_sum_closure_counterexamples_are_negation_triples():
    # sets {0, a, -a} with 3a != 0 are closed under sums of distinct elements
    # without being subgroups; from four elements on the implication holds
    for n in range(3, 20, 2):
        for k in range(3, n + 1):
            for rest in combinations(range(1, n), k - 1):
                S = (0,) + rest
                if closed_under_distinct_sums(S, n) and not is_subgroup(S, n):
                    assert k == 3 and (S[1] + S[2]) % n == 0 and (3 * S[1]) % n != 0


def test_harmonic_bound_examples():
    total, bound = harmonic_bound(3, 3)
    assert total == pytest.approx(1 / 3)
    assert bound == pytest.approx(0.5 * 0.6931471805599453)
    with pytest.raises(BadParity):
        harmonic_bound(4, 7)
    with pytest.raises(BadRange):
        harmonic_bound(7, 5)


@given(st.integers(1, 100), st.integers(0, 100))
def test_harmonic_bound_holds(a, b):
    d1 = 2 * a + 1
    d2 = d1 + 2 * b
    total, bound = harmonic_bound(d1, d2)
    assert total <= bound
    exact = sum(Fraction(1, d) for d in range(d1, d2 + 1, 2))
    assert float(exact) == pytest.approx(total)


def test_admissible_coset_divisors():
    assert admissible_coset_divisors(15) == [5]
    assert admissible_coset_divisors(21) == [3, 7]
    assert admissible_coset_divisors(13) == []
    assert admissible_coset_divisors(27) == [3, 9]
