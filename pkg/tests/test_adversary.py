import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwlab.adversary import (
    AdversaryParams,
    Construction,
    RelationSpec,
    adversary_bound,
    analyze_relation_bruteforce,
    builtin_construction,
)
from qwlab.errors import InputError


class TestBound:
    def test_search_parameters(self):
        assert adversary_bound(AdversaryParams(1, 5, 1)) == pytest.approx(math.sqrt(5))

    def test_unit_parameters(self):
        assert adversary_bound(AdversaryParams(1, 1, 1)) == 1.0

    def test_connectivity_order(self):
        n = 9
        params = AdversaryParams(2 * n * n // 9, n * n // 9, 2 * n)
        # sqrt((2n^2/9)(n^2/9)/(2n)) = n^1.5 / 9
        assert adversary_bound(params) == pytest.approx(n**1.5 / 9.0)

    def test_parameter_validation(self):
        with pytest.raises(InputError):
            AdversaryParams(0, 1, 1)
        with pytest.raises(InputError):
            AdversaryParams(1, 1, 0)

    @given(st.integers(1, 50), st.integers(1, 50), st.integers(1, 50))
    def test_monotone_in_degrees_and_antitone_in_l(self, m, m_prime, l):
        l = min(l, max(m, m_prime))
        base = adversary_bound(AdversaryParams(m, m_prime, l))
        assert adversary_bound(AdversaryParams(m + 1, m_prime, min(l, max(m + 1, m_prime)))) >= base
        assert adversary_bound(AdversaryParams(m, m_prime + 1, l)) >= base
        if l > 1:
            assert adversary_bound(AdversaryParams(m, m_prime, l - 1)) >= base


class TestBruteForce:
    def test_search_relation_exact(self):
        construction = builtin_construction("search", n=5)
        assert construction.exact == AdversaryParams(1, 5, 1)
        assert construction.claimed == construction.exact

    def test_empty_relation_rejected(self):
        spec = RelationSpec(
            a_members=((0, 0),), b_members=((1, 1),), related=lambda x, y: False
        )
        with pytest.raises(InputError):
            analyze_relation_bruteforce(spec)

    def test_unrelated_member_rejected(self):
        spec = RelationSpec(
            a_members=((0, 0), (0, 1)),
            b_members=((1, 0),),
            related=lambda x, y: x == (0, 0) and y == (1, 0),
        )
        with pytest.raises(InputError):
            analyze_relation_bruteforce(spec)

    def test_single_position_binary_relations_have_unit_l(self):
        # differing in exactly one binary position pins the partner, so the
        # strong bound collapses to the weak sqrt(m m') form
        for n in (3, 5, 8):
            construction = builtin_construction("search", n=n)
            assert construction.exact.l == 1
            weak = math.sqrt(construction.exact.m * construction.exact.m_prime)
            assert adversary_bound(construction.exact) == pytest.approx(weak)

    def test_larger_alphabet_raises_l(self):
        spec = RelationSpec(
            a_members=((0,),),
            b_members=((1,), (2,)),
            related=lambda x, y: True,
        )
        exact = analyze_relation_bruteforce(spec)
        assert exact.l == 2
        assert adversary_bound(exact) < math.sqrt(exact.m * exact.m_prime)


class TestConstructions:
    @pytest.mark.parametrize("n", range(2, 11))
    def test_search_formula_matches_enumeration(self, n):
        construction = builtin_construction("search", n=n)
        construction.check_claims()
        assert construction.claimed == construction.exact == AdversaryParams(1, n, 1)
        assert construction.bound == pytest.approx(math.sqrt(n))

    def test_matrix_verification_at_four(self):
        construction = builtin_construction("matrix-verification", n=4)
        construction.check_claims()
        assert construction.claimed == AdversaryParams(8, 3, 1)
        assert construction.exact == AdversaryParams(8, 3, 1)

    def test_matrix_verification_order(self):
        construction = builtin_construction("matrix-verification", n=100, enumerate_exact=False)
        assert construction.exact is None
        assert construction.bound == pytest.approx(math.sqrt(100 * 50 * 51))

    def test_connectivity_smallest_instance_exact_counts(self):
        # n=6: ten two-triangle graphs, each with 3*3*2 single-cycle partners;
        # a 6-cycle regains two triangles only by dropping opposite edges (3 ways)
        construction = builtin_construction("connectivity", n=6)
        assert construction.exact.m == 18
        assert construction.exact.m_prime == 3
        # the 1/9-constant floors only kick in from n=9 up; here m' dips below
        assert construction.claimed.m_prime > construction.exact.m_prime
        with pytest.raises(InputError):
            construction.check_claims()

    def test_commutativity_reduction(self):
        construction = builtin_construction("commutativity", k=2, n=2)
        construction.check_claims()
        assert construction.claimed == AdversaryParams(8, 1, 1)
        assert construction.bound == pytest.approx(math.sqrt(2) * 2)

    def test_commutativity_bound_order(self):
        construction = builtin_construction("commutativity", k=50, n=30, enumerate_exact=False)
        assert construction.bound == pytest.approx(math.sqrt(50) * 30)

    def test_msets_family(self):
        construction = builtin_construction("msets", m=2, k=2, n=2)
        construction.check_claims()
        assert construction.claimed == AdversaryParams(4, 1, 1)
        assert construction.notes["m_adv"] == 4

    def test_unknown_name_rejected(self):
        with pytest.raises(InputError):
            builtin_construction("nonsense")

    def test_claims_check_requires_enumeration(self):
        construction = builtin_construction("search", n=100, enumerate_exact=False)
        with pytest.raises(InputError):
            construction.check_claims()
