import math

import numpy as np
import pytest

from phaselimit import (
    EstimatePOM,
    ValidationError,
    average_distribution,
    canonical_distribution,
    conditional_probability,
    covariant_average_distribution,
    covariant_seed,
    heisenberg_bound,
    kphase_construction,
    make_state,
    mean_number,
    mean_square_deviation,
    per_phase_variance,
    wrap_angle,
)
from conftest import msd_quadrature, number_povm, random_povm, random_state


def moments_by_phase_quadrature(povm, state, n_phi=2048):
    """Third-path oracle: integrate the phase average numerically over a phi
    grid (exact for trigonometric polynomials of degree < n_phi)."""
    d = state.dim
    phis = np.linspace(0, 2 * math.pi, n_phi, endpoint=False)
    m = np.zeros(d, dtype=complex)
    for phi in phis:
        probs = np.array(
            [conditional_probability(povm, state, phi, j) for j in range(povm.n_outcomes)]
        )
        errors = povm.estimates - phi
        for k in range(d):
            m[k] += np.dot(np.exp(1j * k * errors), probs)
    return m / n_phi


class TestWrap:
    def test_convention(self):
        assert wrap_angle(math.pi) == -math.pi
        assert wrap_angle(-math.pi) == -math.pi
        assert wrap_angle(0.5) == pytest.approx(0.5)
        assert wrap_angle(2 * math.pi - 0.25) == pytest.approx(-0.25)


class TestEstimatePOM:
    def test_rejects_incomplete(self):
        with pytest.raises(ValidationError):
            EstimatePOM(np.array([0.0]), np.array([[[0.5, 0], [0, 1.0]]], dtype=complex))

    def test_rejects_non_psd(self):
        half = np.array([[0.5, 0.7], [0.7, 0.5]], dtype=complex)
        with pytest.raises(ValidationError):
            EstimatePOM(np.array([0.0, 1.0]), np.array([half, np.eye(2) - half]))

    def test_rejects_estimate_out_of_range(self):
        with pytest.raises(ValidationError):
            EstimatePOM(np.array([2 * math.pi]), np.eye(2, dtype=complex)[None])

    def test_json_roundtrip(self, rng):
        povm = random_povm(rng, 3, 4)
        back = EstimatePOM.from_json(povm.to_json())
        assert np.allclose(back.elements, povm.elements)
        assert np.allclose(back.estimates, povm.estimates)


class TestConditionalProbability:
    def test_identity_povm(self, rng):
        povm = EstimatePOM(np.array([0.0]), np.eye(5, dtype=complex)[None])
        s = random_state(rng, 5)
        for phi in (0.0, 1.0, 4.5):
            assert conditional_probability(povm, s, phi, 0) == pytest.approx(1.0)

    def test_number_measurement_phase_independent(self, rng):
        povm = number_povm(6)
        s = random_state(rng, 6)
        ref = [conditional_probability(povm, s, 0.0, j) for j in range(6)]
        for phi in (0.7, 3.1):
            probs = [conditional_probability(povm, s, phi, j) for j in range(6)]
            assert np.allclose(probs, ref, atol=1e-12)

    def test_probabilities_sum_to_one(self, rng):
        povm = random_povm(rng, 4, 6)
        s = random_state(rng, 4)
        total = sum(conditional_probability(povm, s, 2.2, j) for j in range(6))
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_index_out_of_range(self, rng):
        povm = number_povm(3)
        with pytest.raises(ValidationError):
            conditional_probability(povm, random_state(rng, 3), 0.0, 5)


class TestAverageDistribution:
    def test_identity_on_vacuum_is_uniform(self):
        povm = EstimatePOM(np.array([0.0]), np.eye(1, dtype=complex)[None])
        dist = average_distribution(povm, make_state([1]))
        assert dist.moments[0] == 1
        assert dist.kmax == 0

    def test_number_measurement_is_uniform(self, rng):
        # number statistics carry no phase information
        povm = number_povm(5, estimates=np.linspace(0, 5, 5))
        s = random_state(rng, 5)
        dist = average_distribution(povm, s)
        assert np.allclose(dist.moments[1:], 0, atol=1e-12)
        oracle = moments_by_phase_quadrature(povm, s)
        assert np.allclose(dist.moments, oracle, atol=1e-10)

    def test_matches_phase_quadrature(self, rng):
        for _ in range(5):
            s = random_state(rng, 4)
            povm = random_povm(rng, 4, 5)
            dist = average_distribution(povm, s)
            oracle = moments_by_phase_quadrature(povm, s)
            assert np.allclose(dist.moments, oracle, atol=1e-10)

    def test_canonical_limit(self, rng):
        # a finely discretized covariant canonical measurement reproduces the
        # canonical phase distribution of the state
        d, n_out = 4, 64
        thetas = 2 * math.pi * np.arange(n_out) / n_out
        n = np.arange(d)
        ones = np.ones(d) / math.sqrt(d)
        elements = []
        for th in thetas:
            psi = np.exp(-1j * n * th) * ones
            elements.append(np.outer(psi, np.conj(psi)) * d / n_out)
        povm = EstimatePOM(thetas, np.array(elements))
        s = random_state(rng, d)
        dist = average_distribution(povm, s)
        assert np.allclose(dist.moments, canonical_distribution(s).moments, atol=1e-12)


class TestCovariantSeed:
    def test_completeness_diagonal(self, rng):
        seed = covariant_seed(random_povm(rng, 5, 7))
        assert np.allclose(2 * math.pi * np.diagonal(seed), 1.0, atol=1e-10)

    def test_fixed_point_single_element(self):
        povm = EstimatePOM(np.array([0.0]), np.eye(3, dtype=complex)[None])
        seed = covariant_seed(povm)
        assert np.allclose(seed, np.eye(3) / (2 * math.pi), atol=1e-14)

    def test_kphase_seed_is_scaled_projector(self):
        K = 4
        psi, povm, _ = kphase_construction(K)
        seed = covariant_seed(povm)
        expected = np.outer(psi.amplitudes, np.conj(psi.amplitudes)) * K / (2 * math.pi)
        assert np.allclose(seed, expected, atol=1e-12)

    def test_two_path_moment_equality(self, rng):
        for _ in range(5):
            s = random_state(rng, 4)
            povm = random_povm(rng, 4, 6)
            direct = average_distribution(povm, s)
            via_seed = covariant_average_distribution(covariant_seed(povm), s)
            assert np.allclose(direct.moments, via_seed.moments, atol=1e-12)


class TestPerPhaseVariance:
    def test_kphase_zero_error_at_special_phases(self):
        psi, povm, _ = kphase_construction(4)
        for k in range(4):
            assert per_phase_variance(povm, psi, 2 * math.pi * k / 4) == pytest.approx(
                0.0, abs=1e-12
            )

    def test_deterministic_zero_estimate(self, rng):
        povm = number_povm(4)  # all estimates 0
        s = random_state(rng, 4)
        assert per_phase_variance(povm, s, math.pi / 2) == pytest.approx(
            (math.pi / 2) ** 2, abs=1e-10
        )

    def test_phase_average_identity(self, rng):
        # averaging Var_phi over phi equals the msd of the average distribution
        s = random_state(rng, 4)
        povm = random_povm(rng, 4, 5)
        phis = np.linspace(0, 2 * math.pi, 4096, endpoint=False)
        avg = np.mean([per_phase_variance(povm, s, phi) for phi in phis])
        msd = mean_square_deviation(average_distribution(povm, s))
        assert avg == pytest.approx(msd, abs=1e-6)


class TestKPhaseConstruction:
    def test_k2(self):
        psi, povm, report = kphase_construction(2)
        assert np.allclose(psi.amplitudes, [1 / math.sqrt(2)] * 2)
        assert report["gram_identity_error"] < 1e-12
        assert report["mean_number"] == 0.5
        assert np.allclose(report["success_probabilities"], 1.0, atol=1e-12)

    def test_k8_orthogonality_and_completeness(self):
        _, povm, report = kphase_construction(8)
        assert report["gram_identity_error"] < 1e-12
        assert np.allclose(povm.elements.sum(axis=0), np.eye(8), atol=1e-12)

    def test_k1_trivial(self):
        psi, _, report = kphase_construction(1)
        assert report["mean_number"] == 0.0
        assert report["success_probabilities"] == [1.0]

    def test_invalid_k(self):
        with pytest.raises(ValidationError):
            kphase_construction(0)

    def test_average_error_still_respects_bound(self):
        # zero error holds only at the K special phases; averaged over all
        # phases the universal bound still applies
        psi, povm, _ = kphase_construction(8)
        dist = average_distribution(povm, psi)
        delta = math.sqrt(mean_square_deviation(dist))
        assert delta > heisenberg_bound(mean_number(psi))


class TestUniversalBound:
    def test_average_msd_respects_heisenberg(self, rng):
        for _ in range(10):
            d = int(rng.integers(2, 8))
            s = random_state(rng, d)
            povm = random_povm(rng, d, int(rng.integers(2, 7)))
            dist = average_distribution(povm, s)
            delta = math.sqrt(mean_square_deviation(dist))
            assert delta > heisenberg_bound(mean_number(s))

    def test_quadrature_cross_check(self, rng):
        s = random_state(rng, 5)
        povm = random_povm(rng, 5, 4)
        dist = average_distribution(povm, s)
        assert mean_square_deviation(dist) == pytest.approx(
            msd_quadrature(dist), abs=1e-10
        )
