import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwlab import costlab
from qwlab.errors import InputError


class TestCostForms:
    def test_ed_cost_value(self):
        model = costlab.build_model("ed", n=1e6)
        # r + n / sqrt(r)
        assert costlab.szegedy_cost(model, {"r": 100.0}) == pytest.approx(100.0 + 1e6 / 10.0)

    def test_update_and_check_free_cost_is_setup(self):
        model = costlab.build_model("mv", n=1e4)
        stripped = costlab.CostModel(
            name="mv", framework="szegedy", size_names=("r",), params={"n": 1e4},
            setup=model.setup, update=lambda e: 0.0, check=lambda e: 0.0,
            delta=model.delta, epsilon=model.epsilon,
        )
        assert costlab.szegedy_cost(stripped, {"r": 37.0}) == 37.0 * 1e4

    def test_zero_gap_rejected(self):
        model = costlab.build_model("ed", n=10.0)
        bad = costlab.CostModel(
            name="ed", framework="szegedy", size_names=("r",), params={"n": 10.0},
            setup=model.setup, update=model.update, check=model.check,
            delta=lambda e: 0.0, epsilon=model.epsilon,
        )
        with pytest.raises(InputError):
            costlab.szegedy_cost(bad, {"r": 2.0})

    def test_ambainis_full_subset(self):
        model = costlab.build_model("triangle-ambainis", n=100.0)
        value = costlab.ambainis_cost(model, {"r": 100.0})
        n = 100.0
        expected = n**2 + (math.sqrt(n) * n ** (2 / 3) + math.sqrt(n) * n)
        assert value == pytest.approx(expected)

    def test_triangle_inner_minimum(self):
        model = costlab.build_model("triangle-inner", r=1e6)
        result = costlab.optimize_model(model)
        assert result.sizes["s"] == pytest.approx((1e6 / 2) ** (2 / 3), rel=0.02)

    def test_matrix_verification_headline_value(self):
        n = 1e6
        model = costlab.build_model("mv", n=n)
        at_opt = costlab.szegedy_cost(model, {"r": n ** (2 / 3)})
        assert at_opt == pytest.approx(2 * n ** (5 / 3))


class TestOptimizer:
    def test_ed_optimum_location(self):
        result = costlab.optimize_model(costlab.build_model("ed", n=1e6))
        assert result.sizes["r"] == pytest.approx((1e6 / 2) ** (2 / 3), rel=0.01)
        assert not result.boundary

    def test_boundary_flag_for_monotone_cost(self):
        result = costlab.optimize_model(costlab.build_model("triangle-szegedy", n=1e6))
        assert result.boundary and result.sizes["r"] == 1

    def test_exact_integer_refinement(self):
        model = costlab.build_model("ed", n=12345.0)
        fn = lambda sizes: costlab.cost(model, sizes)
        result = costlab.optimize(fn, {"r": (1, 12345)})
        r0 = result.sizes["r"]
        neighborhood = {r: fn({"r": r}) for r in range(max(1, r0 - 200), r0 + 200)}
        best = min(neighborhood, key=lambda r: (neighborhood[r], r))
        assert r0 == best

    def test_tie_breaks_toward_smaller_sizes(self):
        result = costlab.optimize(lambda sizes: 1.0, {"r": (1, 50)})
        assert result.sizes["r"] == 1

    def test_empty_domain_rejected(self):
        with pytest.raises(InputError):
            costlab.optimize(lambda sizes: 1.0, {"r": (5, 4)})

    @given(st.floats(0.1, 1000.0))
    def test_argmin_invariant_under_positive_scaling(self, scale):
        model = costlab.build_model("ed", n=1e5)
        base = costlab.optimize(lambda s: costlab.cost(model, s), {"r": (1, 100_000)})
        scaled = costlab.optimize(
            lambda s: scale * costlab.cost(model, s), {"r": (1, 100_000)}
        )
        assert base.sizes == scaled.sizes


class TestFits:
    def test_exact_power_law_recovery(self):
        xs = np.geomspace(10, 1e6, 8)
        slope, intercept, residual = costlab.fit_exponent(xs, 3.0 * xs**1.7)
        assert slope == pytest.approx(1.7, abs=1e-9)
        assert residual <= 1e-9

    def test_requires_six_samples(self):
        with pytest.raises(InputError):
            costlab.fit_exponent([1, 2, 3], [1, 2, 3])


class TestFrameworkComparison:
    def _triangle_parts(self):
        setup = lambda e: e["r"] ** 2
        update = lambda e: e["r"]
        check = lambda e: math.sqrt(e["n"]) * e["r"] ** (2 / 3)
        return setup, update, check

    def test_triangle_head_to_head(self):
        setup, update, check = self._triangle_parts()
        n = 1e6
        comparison = costlab.compare_frameworks(setup, update, check, n, 2, (1, int(n)))
        assert comparison.check_term_never_worse
        # order-of-growth bands; the exponents themselves are pinned by fits
        assert n**1.3 / 4 <= comparison.ambainis.cost <= 4 * n**1.3
        assert n**1.5 / 4 <= comparison.szegedy.cost <= 4 * n**1.5
        assert comparison.ambainis.cost < comparison.szegedy.cost
        for r, ratio in comparison.check_term_ratios:
            assert ratio == pytest.approx(r ** (-0.5))

    def test_zero_check_gives_identical_optima(self):
        setup = lambda e: e["r"] * e["n"]
        update = lambda e: e["n"]
        check = lambda e: 0.0
        comparison = costlab.compare_frameworks(setup, update, check, 1e6, 2, (1, 10**6))
        assert comparison.szegedy.cost == pytest.approx(comparison.ambainis.cost)
        assert comparison.szegedy.sizes == comparison.ambainis.sizes

    def test_frameworks_coincide_at_unit_subset(self):
        setup, update, check = self._triangle_parts()
        n = 1e4
        e = {"n": n, "r": 1.0}
        sz = setup(e) + math.sqrt(1.0) * (n / 1.0) * (update(e) + check(e))
        am = setup(e) + (n / 1.0) * check(e) + (n / 1.0) * math.sqrt(1.0) * update(e)
        assert sz == pytest.approx(am)


class TestPowerWalk:
    def test_single_steps_reduce_to_simultaneous_walk(self):
        k = n = 4096.0
        alg4 = costlab.build_model("alg4", k=k, n=n)
        for r in (2.0, 16.0, 300.0):
            for s in (2.0, 64.0):
                assert costlab.power_walk_cost(k, n, 1, 1, r, s) == pytest.approx(
                    costlab.szegedy_cost(alg4, {"r": r, "s": s})
                )

    def test_gap_factor_decays_monotonically_to_one(self):
        r = 10.0
        factors = [
            1.0 / math.sqrt(1.0 - (1.0 - 1.0 / r) ** u) for u in (1, 2, 4, 8, 16, 64, 256)
        ]
        assert all(a > b for a, b in zip(factors, factors[1:]))
        assert factors[-1] == pytest.approx(1.0, abs=1e-3)

    def test_multi_stepping_never_improves(self):
        k = n = 2048.0
        base = costlab.optimize_model(costlab.build_model("power-walk", k=k, n=n, u_steps=1, v_steps=1))
        for u in (1, 2, 8, 32):
            for v in (1, 4, 16):
                res = costlab.optimize_model(
                    costlab.build_model("power-walk", k=k, n=n, u_steps=u, v_steps=v)
                )
                assert res.cost >= base.cost - 1e-9

    def test_optimal_cost_scales_with_fifth_root_of_step_counts(self):
        # optimal cost grows like k^{4/5} n^{9/5} (u v)^{1/5}
        k = n = float(2**13)
        steps = [1, 2, 4, 8, 16, 32, 64]
        u_costs = [
            costlab.optimize_model(
                costlab.build_model("power-walk", k=k, n=n, u_steps=u, v_steps=1)
            ).cost
            for u in steps
        ]
        v_costs = [
            costlab.optimize_model(
                costlab.build_model("power-walk", k=k, n=n, u_steps=1, v_steps=v)
            ).cost
            for v in steps
        ]
        assert abs(costlab.fit_exponent(steps, u_costs).exponent - 0.2) <= 0.02
        assert abs(costlab.fit_exponent(steps, v_costs).exponent - 0.2) <= 0.02
        sizes = [float(2**e) for e in range(10, 17)]
        n_costs = [
            costlab.optimize_model(
                costlab.build_model("power-walk", k=x, n=x, u_steps=4, v_steps=4)
            ).cost
            for x in sizes
        ]
        assert abs(costlab.fit_exponent(sizes, n_costs).exponent - 2.6) <= 0.02


class TestSimultaneousWalkModel:
    def test_interior_optimum_inside_regime(self):
        # k^{2/3} <= n <= k^{3/2} admits the k^{2/5} n^{2/5} optimum
        result = costlab.optimize_model(costlab.build_model("alg4", k=1e6, n=1e6))
        assert not result.boundary
        assert result.sizes["r"] == result.sizes["s"]
        assert result.sizes["r"] == pytest.approx((1e12 / 2) ** 0.4, rel=0.02)

    def test_boundary_flag_outside_regime(self):
        # n far below k^{2/3}: the interior optimum exits the box and the
        # minimizer lands on a domain edge (holding every row and column)
        result = costlab.optimize_model(costlab.build_model("alg4", k=1e6, n=10))
        assert result.boundary
        assert result.sizes["s"] == 10
        # the trivial walk priced by the same formula is the 2kn^2 fallback
        trivial = costlab.cost(costlab.build_model("alg4", k=1e6, n=10), {"r": 1, "s": 1})
        assert trivial == pytest.approx(10 + 2 * 1e6 * 100)
        assert result.cost <= trivial


class TestRegimeSelector:
    def test_balanced_parameters_prefer_rowcol(self):
        n = 1e4
        out = costlab.regime_selector(n, n)
        assert out["best"] == "rowcol-simul"

    def test_few_matrices_prefer_grover_pair(self):
        n = 1e6
        assert costlab.regime_selector(math.sqrt(n), n)["best"] == "grover-pair"

    def test_many_matrices_prefer_set_walk(self):
        n = 1e4
        assert costlab.regime_selector(n**2, n)["best"] == "set-walk"


class TestThreeParamCost:
    def test_symmetric_optimum(self):
        result = costlab.optimize_model(costlab.build_model("alg5", m=1e5, k=1e5, n=1e5))
        assert result.sizes["t"] == result.sizes["r"] == result.sizes["s"]
        expected = (1e15 / 2) ** (2 / 7)
        assert result.sizes["t"] == pytest.approx(expected, rel=0.05)

    def test_comparison_strategies(self):
        m = k = n = 1e4
        grover_sets = costlab.grover_over_sets_cost(m, k, n)
        ed_sets = costlab.ed_over_sets_cost(m, k, n)
        walk = costlab.optimize_model(costlab.build_model("alg5", m=m, k=k, n=n)).cost
        assert grover_sets == pytest.approx(n ** (2 + 5 / 3))
        assert ed_sets == pytest.approx(n ** (2 / 3 + 1 + 5 / 3))
        # with all parameters equal the collision-over-sets strategy has the
        # best exponent; the walk's exponent beats plain Grover asymptotically,
        # so its cost ratio against Grover must fall as sizes grow
        assert ed_sets < grover_sets
        big = 1e7
        walk_big = costlab.optimize_model(costlab.build_model("alg5", m=big, k=big, n=big)).cost
        assert walk_big / costlab.grover_over_sets_cost(big, big, big) < walk / grover_sets


class TestRepetitions:
    def test_half_probability_needs_one_round(self):
        assert costlab.repetitions_for_half_error(0.5) == 1

    def test_ten_percent(self):
        assert costlab.repetitions_for_half_error(0.1) == 7

    def test_certain_success(self):
        assert costlab.repetitions_for_half_error(1.0) == 1

    def test_rejects_zero(self):
        with pytest.raises(InputError):
            costlab.repetitions_for_half_error(0.0)

    @given(st.floats(1e-6, 1.0 - 1e-9))
    def test_miss_probability_halved(self, eps):
        k = costlab.repetitions_for_half_error(eps)
        assert (1.0 - eps) ** k <= 0.5 + 1e-12
