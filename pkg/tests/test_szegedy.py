import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_marked_chain
from qwlab import markov, szegedy
from qwlab.errors import InputError
from qwlab.numkernel import SeededRng, sym_eig


def _absorbing(p, members):
    return markov.make_absorbing(p, markov.MarkedSet(members, p.n_states))


class TestQuantizedWalk:
    def test_isometries_and_unitarity(self, two_state_chain):
        walk = szegedy.build_quantized_walk(two_state_chain)
        n = two_state_chain.n_states
        assert np.allclose(walk.lift_a.T @ walk.lift_a, np.eye(n), atol=1e-12)
        assert np.allclose(walk.lift_b.T @ walk.lift_b, np.eye(n), atol=1e-12)
        w = walk.matrix()
        assert np.max(np.abs(w.T @ w - np.eye(4))) <= 1e-8

    def test_unmarked_symmetric_chain_fixes_uniform_lift(self):
        p = markov.random_chain(4, SeededRng(21))
        chain = _absorbing(p, [])
        walk = szegedy.build_quantized_walk(chain)
        phi0 = walk.lift_a @ (np.ones(4) / 2.0)
        assert np.max(np.abs(walk.apply(phi0) - phi0)) <= 1e-12

    def test_complement_of_both_lifts_is_fixed(self):
        p = markov.random_chain(3, SeededRng(22))
        chain = _absorbing(p, [1])
        walk = szegedy.build_quantized_walk(chain)
        gen = SeededRng(23).generator()
        v = gen.standard_normal(9)
        basis = np.hstack([walk.lift_a, walk.lift_b])
        v -= basis @ np.linalg.lstsq(basis, v, rcond=None)[0]
        assert np.linalg.norm(v) > 1e-6
        assert np.max(np.abs(walk.apply(v) - v)) <= 1e-10

    def test_reflection_fixes_every_lifted_column(self, two_state_chain):
        walk = szegedy.build_quantized_walk(two_state_chain)
        for x in range(2):
            phi = walk.lift_a[:, x]
            reflected = 2.0 * (walk.lift_a @ (walk.lift_a.T @ phi)) - phi
            assert np.allclose(reflected, phi, atol=1e-12)

    def test_dimension_budget(self):
        p = markov.random_chain(5, SeededRng(24))
        with pytest.raises(InputError):
            szegedy.build_quantized_walk(_absorbing(p, []), max_states=4)


class TestDiscriminant:
    def test_two_state_block_structure(self, two_state_chain):
        disc = szegedy.discriminant(two_state_chain)
        assert np.allclose(disc.d_matrix, [[0.5, 0.0], [0.0, 1.0]])
        assert np.allclose(disc.singular_values, [1.0, 0.5])
        assert np.allclose(disc.angles, [0.0, np.pi / 3.0])

    def test_unmarked_chain_gives_back_p(self):
        p = markov.random_chain(5, SeededRng(31))
        disc = szegedy.discriminant(_absorbing(p, []))
        assert np.allclose(disc.d_matrix, p.probs, atol=1e-12)
        values, _ = sym_eig(p.probs)
        assert np.allclose(np.sort(disc.singular_values), np.sort(np.abs(values)), atol=1e-10)

    def test_singular_values_bounded_by_one(self):
        for i in range(50):
            p, marked = random_marked_chain(i, base_seed=31000)
            disc = szegedy.discriminant(markov.make_absorbing(p, marked))
            assert np.all(disc.singular_values <= 1.0 + 1e-10)


class TestWalkSpectrum:
    def test_two_state_phases(self, two_state_chain):
        walk = szegedy.build_quantized_walk(two_state_chain)
        disc = szegedy.discriminant(two_state_chain)
        spec = szegedy.walk_spectrum(walk, disc)
        expected = np.sort([-2 * np.pi / 3, 0.0, 0.0, 2 * np.pi / 3])
        assert np.allclose(spec.phases, expected, atol=1e-8)

    def test_unmarked_chain_has_zero_phase_for_stationary(self):
        p = markov.random_chain(3, SeededRng(41))
        chain = _absorbing(p, [])
        walk = szegedy.build_quantized_walk(chain)
        spec = szegedy.walk_spectrum(walk, szegedy.discriminant(chain))
        assert np.min(np.abs(spec.phases)) <= 1e-8

    def test_complete_graph_walk_with_one_marked_vertex(self):
        p = markov.build_johnson_walk(4, 1)
        chain = _absorbing(p, [2])
        walk = szegedy.build_quantized_walk(chain)
        disc = szegedy.discriminant(chain)
        spec = szegedy.walk_spectrum(walk, disc)
        assert spec.max_phase_error <= 1e-6
        for sigma in np.linalg.svd(chain.p_m)[1]:
            assert np.min(np.abs(np.abs(spec.phases) - 2 * math.acos(min(sigma, 1.0)))) <= 1e-6

    def test_random_chains_match_prediction(self):
        for i, n in enumerate([2, 4, 7, 9, 12, 14]):
            p = markov.random_chain(n, SeededRng(42000 + n))
            gen = SeededRng(42100, n).generator()
            members = gen.choice(n, size=int(gen.integers(1, n)), replace=False).tolist()
            chain = _absorbing(p, members)
            walk = szegedy.build_quantized_walk(chain)
            spec = szegedy.walk_spectrum(walk, szegedy.discriminant(chain))
            assert spec.max_phase_error <= 1e-6


class TestStartState:
    def test_unmarked_norm_is_one(self):
        p = markov.random_chain(4, SeededRng(51))
        start = szegedy.start_state(_absorbing(p, []))
        assert float(start.vector @ start.vector) == pytest.approx(1.0, abs=1e-12)

    def test_two_state_norm(self, two_state_chain):
        start = szegedy.start_state(two_state_chain)
        assert float(start.vector @ start.vector) == pytest.approx(0.5, abs=1e-12)
        assert np.allclose(start.coefficients, [1.0])

    def test_all_marked_sentinel(self):
        p = markov.random_chain(3, SeededRng(52))
        start = szegedy.start_state(_absorbing(p, [0, 1, 2]))
        assert start.all_marked
        assert np.all(start.vector == 0.0)

    def test_coefficients_match_uniform_expansion_over_pm_eigenbasis(self):
        p, marked = random_marked_chain(3, base_seed=52000)
        chain = markov.make_absorbing(p, marked)
        start = szegedy.start_state(chain)
        _, vectors = sym_eig(chain.p_m)
        ones_m = np.ones(len(chain.unmarked)) / math.sqrt(chain.n_states)
        nu_unnormalized = vectors.T @ ones_m
        assert np.allclose(
            start.coefficients * math.sqrt(1.0 - chain.epsilon), nu_unnormalized, atol=1e-10
        )
        assert float(start.coefficients @ start.coefficients) == pytest.approx(1.0, abs=1e-8)


class TestDeviationTime:
    def test_two_state_bound(self, two_state_chain):
        disc = szegedy.discriminant(two_state_chain)
        start = szegedy.start_state(two_state_chain)
        t = szegedy.deviation_time_bound(disc, start.coefficients)
        assert t == math.ceil(100.0 * 3.0 / math.pi) == 96

    def test_bound_below_norm_form(self):
        for i in range(10):
            p, marked = random_marked_chain(i, base_seed=53000)
            chain = markov.make_absorbing(p, marked)
            disc = szegedy.discriminant(chain)
            start = szegedy.start_state(chain)
            t = szegedy.deviation_time_bound(disc, start.coefficients)
            summary = markov.spectral_summary(p, marked)
            assert t <= math.ceil(100.0 / math.sqrt(1.0 - summary.pm_norm))

    def test_doubling_angles_halves_the_sum(self):
        # doubled angles must stay inside [0, pi/2] for arccos to recover them
        theta = np.array([0.3, 0.7])
        nu = np.array([0.6, 0.8])
        base = szegedy.DiscriminantSpectrum(
            d_matrix=np.eye(2), singular_values=np.cos(theta), left_vectors=np.eye(2),
            right_vectors=np.eye(2), angles=theta, pm_eigenvalues=np.cos(theta),
        )
        doubled = szegedy.DiscriminantSpectrum(
            d_matrix=np.eye(2), singular_values=np.cos(2 * theta), left_vectors=np.eye(2),
            right_vectors=np.eye(2), angles=2 * theta, pm_eigenvalues=np.cos(2 * theta),
        )
        raw = float(np.sum(nu**2 / theta))
        assert szegedy.deviation_time_bound(base, nu) == math.ceil(100 * raw)
        assert szegedy.deviation_time_bound(doubled, nu) == math.ceil(100 * raw / 2.0)


class TestDeviationReport:
    def test_report_bundles_bound_and_deviation(self, two_state_chain):
        report = szegedy.deviation_report(two_state_chain)
        assert report.t_bound == 96
        assert report.epsilon == 0.5
        assert report.avg_deviation >= (48.0 / 25.0) * 0.5
        assert np.allclose(report.coefficients, [1.0])
        assert float(report.coefficients @ report.coefficients) == pytest.approx(1.0)

    def test_override_budget(self, two_state_chain):
        report = szegedy.deviation_report(two_state_chain, t_bound=0)
        assert report.t_bound == 0 and report.avg_deviation == 0.0


class TestAverageDeviation:
    def test_unmarked_chain_never_deviates(self):
        p = markov.random_chain(4, SeededRng(61))
        chain = _absorbing(p, [])
        walk = szegedy.build_quantized_walk(chain)
        for t in (0, 5, 20):
            assert szegedy.average_deviation(walk, chain, t) <= 1e-12

    def test_zero_steps(self, two_state_chain):
        walk = szegedy.build_quantized_walk(two_state_chain)
        assert szegedy.average_deviation(walk, two_state_chain, 0) == 0.0

    def test_two_state_meets_floor_at_bound(self, two_state_chain):
        walk = szegedy.build_quantized_walk(two_state_chain)
        avg = szegedy.average_deviation(walk, two_state_chain, 96)
        assert avg >= (48.0 / 25.0) * 0.5

    def test_matches_overlap_form(self, two_state_chain):
        walk = szegedy.build_quantized_walk(two_state_chain)
        t = 17
        avg = szegedy.average_deviation(walk, two_state_chain, t)
        series = szegedy.overlap_series(walk, two_state_chain, t)
        eps = two_state_chain.epsilon
        alt = 2.0 * ((1.0 - eps) - float(np.mean(series)))
        assert avg == pytest.approx(alt, abs=1e-8)

    def test_overlap_matches_cosine_expansion(self):
        p, marked = random_marked_chain(7, base_seed=62000)
        chain = markov.make_absorbing(p, marked)
        walk = szegedy.build_quantized_walk(chain)
        disc = szegedy.discriminant(chain)
        start = szegedy.start_state(chain, walk)
        series = szegedy.overlap_series(walk, chain, 200)
        theta = np.arccos(np.abs(disc.pm_eigenvalues))
        ts = np.arange(201)
        predicted = (1 - chain.epsilon) * (
            start.coefficients**2 @ np.cos(2 * np.outer(theta, ts))
        )
        assert np.max(np.abs(series - predicted)) <= 1e-8


class TestDetection:
    def test_unmarked_chain_never_detects(self):
        p = markov.random_chain(3, SeededRng(71))
        chain = _absorbing(p, [])
        eps, probs, total = szegedy.detection_profile(chain, 50)
        assert eps == 0.0
        assert np.all(probs <= 1e-10)
        result = szegedy.run_detection(chain, 50, 10_000, SeededRng(72))
        assert result.total == 0.0

    def test_all_marked_detects_immediately(self):
        p = markov.random_chain(3, SeededRng(73))
        chain = _absorbing(p, [0, 1, 2])
        result = szegedy.run_detection(chain, 10, 1000, SeededRng(74))
        assert result.prob_found_immediately == 1.0
        assert result.total == 1.0

    def test_two_state_meets_theorem_floor(self, two_state_chain):
        result = szegedy.run_detection(two_state_chain, 96, 100_000, SeededRng(75))
        floor = 12.0 / 25.0 + 13.0 / 50.0
        sigma = math.sqrt(result.analytic_total * (1 - result.analytic_total) / result.trials)
        assert result.total >= floor - 3.0 * sigma
        assert abs(result.total - result.analytic_total) <= 3.0 * sigma

    def test_deterministic_given_seed(self, two_state_chain):
        a = szegedy.run_detection(two_state_chain, 30, 5000, SeededRng(76))
        b = szegedy.run_detection(two_state_chain, 30, 5000, SeededRng(76))
        assert a == b


class TestQuantumHittingBound:
    def test_half_norm(self):
        assert szegedy.quantum_hitting_bound(0.5) == 142

    def test_zero_norm(self):
        assert szegedy.quantum_hitting_bound(0.0) == 100

    def test_full_norm_is_infinite(self):
        assert szegedy.quantum_hitting_bound(1.0) == math.inf

    @pytest.mark.parametrize("n", [6, 8])
    def test_johnson_scaling(self, n):
        p = markov.build_johnson_walk(n, 2)
        marked = markov.subsets_containing(n, 2, [0, 1])
        summary = markov.spectral_summary(p, marked)
        t = szegedy.quantum_hitting_bound(summary.pm_norm)
        ceiling = 100.0 * math.sqrt(2.0) / math.sqrt(summary.spectral_gap * marked.epsilon)
        assert t <= math.ceil(ceiling)


class TestReflectionComposition:
    def test_orthogonal_vectors_give_half_turn(self):
        angle = szegedy.reflection_composition_angle([1.0, 0.0], [0.0, 1.0])
        assert angle == pytest.approx(math.pi)

    def test_sixty_degree_overlap(self):
        a = np.array([1.0, 0.0])
        b = np.array([0.5, math.sqrt(3) / 2.0])
        assert szegedy.reflection_composition_angle(a, b) == pytest.approx(2 * math.pi / 3)

    def test_parallel_vectors_rejected(self):
        with pytest.raises(InputError):
            szegedy.reflection_composition_angle([1.0, 0.0], [1.0, 0.0])

    @given(st.integers(0, 10_000))
    def test_angle_matches_operator_eigenphases(self, seed):
        gen = SeededRng(77000, seed).generator()
        a = gen.standard_normal(4)
        b = gen.standard_normal(4)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        if abs(float(a @ b)) >= 1.0 - 1e-6:
            return
        angle = szegedy.reflection_composition_angle(a, b)
        op = (2 * np.outer(b, b) - np.eye(4)) @ (2 * np.outer(a, a) - np.eye(4))
        phases = np.abs(np.angle(np.linalg.eigvals(op)))
        assert np.min(np.abs(phases - angle)) <= 1e-8
