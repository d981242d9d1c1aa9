import numpy as np
import pytest

from ksqrng.errors import ValidationError
from ksqrng.readout import (
    IQPoint,
    NoiseParams,
    ReadoutLevel,
    apply_relaxation,
    classify,
    estimate_misclassification,
    sample_level,
    synth_iq,
    thermal_init,
)

DEFAULTS = NoiseParams()


def gen(seed=0):
    return np.random.default_rng(seed)


class TestNoiseParams:
    def test_defaults_valid(self):
        p = NoiseParams()
        assert p.p_thermal_1 + p.p_thermal_2 < 0.01

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"p_thermal_1": 1.5},
            {"p_thermal_1": -0.1},
            {"p_decay_10": 2.0},
            {"p_thermal_1": 0.6, "p_thermal_2": 0.5},
            {"iq_sigma": 0.0},
            {"iq_sigma": -1.0},
            {"gate_amp_error": -0.1},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValidationError):
            NoiseParams(**kwargs)

    def test_rejects_coincident_centers(self):
        with pytest.raises(ValidationError):
            NoiseParams(iq_centers=(IQPoint(0, 0), IQPoint(0, 0), IQPoint(1, 1)))


class TestThermalInit:
    def test_noiseless_limit(self):
        p = NoiseParams(p_thermal_1=0.0, p_thermal_2=0.0)
        levels = thermal_init(p, gen(1), size=1000)
        assert np.all(levels == 0)
        assert thermal_init(p, gen(2)) == ReadoutLevel.L0

    def test_ground_frequency_at_defaults(self):
        # binomial 3 sigma around 1 - p_thermal_1 - p_thermal_2 = 0.9982
        levels = thermal_init(DEFAULTS, gen(3), size=1_000_000)
        f0 = np.mean(levels == 0)
        assert abs(f0 - 0.9982) < 3 * np.sqrt(0.0018 * 0.9982 / 1e6)

    def test_excited_total_below_one_percent(self):
        levels = thermal_init(DEFAULTS, gen(4), size=1_000_000)
        assert np.mean(levels != 0) < 0.01

    def test_deterministic(self):
        a = thermal_init(DEFAULTS, gen(5), size=10_000)
        b = thermal_init(DEFAULTS, gen(5), size=10_000)
        assert np.array_equal(a, b)


class TestSampleLevel:
    def test_deterministic_distribution(self):
        out = sample_level(np.array([1.0, 0.0, 0.0]), gen(6), size=1000)
        assert np.all(out == 0)

    def test_zero_probability_outcome_never_drawn(self):
        out = sample_level(np.array([0.5, 0.0, 0.5]), gen(7), size=1_000_000)
        assert np.count_nonzero(out == 1) == 0

    def test_binomial_band(self):
        out = sample_level(np.array([0.5, 0.0, 0.5]), gen(8), size=1_000_000)
        assert abs(np.mean(out == 0) - 0.5) < 0.0015  # 3 sigma

    def test_rowwise_probabilities(self):
        probs = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        assert np.array_equal(sample_level(probs, gen(9)), [0, 1, 2])

    def test_malformed_distribution_rejected(self):
        with pytest.raises(ValidationError):
            sample_level(np.array([0.5, 0.1, 0.5]), gen(10))
        with pytest.raises(ValidationError):
            sample_level(np.array([1.2, -0.2, 0.0]), gen(10))


class TestApplyRelaxation:
    def test_ground_state_stable(self):
        p = NoiseParams(p_decay_10=1.0, p_decay_21=1.0)
        assert apply_relaxation(ReadoutLevel.L0, p, gen(11)) == ReadoutLevel.L0
        out = apply_relaxation(np.zeros(1000, dtype=np.uint8), p, gen(12))
        assert np.all(out == 0)

    def test_decay_frequency_from_first_excited(self):
        levels = np.ones(1_000_000, dtype=np.uint8)
        out = apply_relaxation(levels, DEFAULTS, gen(13))
        assert abs(np.mean(out == 0) - 0.072) < 0.0008  # binomial 3 sigma

    def test_full_cascade(self):
        p = NoiseParams(p_decay_21=1.0, p_decay_10=1.0)
        out = apply_relaxation(np.full(1000, 2, dtype=np.uint8), p, gen(14))
        assert np.all(out == 0)

    def test_never_increases_level(self):
        rng = gen(15)
        levels = rng.integers(0, 3, 10_000).astype(np.uint8)
        out = apply_relaxation(levels, DEFAULTS, rng)
        assert np.all(out <= levels)


class TestSynthIQ:
    def test_vanishing_noise_returns_center(self):
        p = NoiseParams(iq_sigma=1e-300)
        pt = synth_iq(ReadoutLevel.L1, p, gen(16))
        assert abs(pt.i - 0.0) < 1e-250 and pt.q == 1.0

    def test_mean_at_center(self):
        i, q = synth_iq(np.zeros(1_000_000, dtype=np.uint8), DEFAULTS, gen(17))
        assert abs(i.mean() - 1.0) < 0.001  # 3 sigma / sqrt(N) = 5.4e-4
        assert abs(q.mean() - 0.0) < 0.001

    def test_per_axis_variance(self):
        i, q = synth_iq(np.full(1_000_000, 2, dtype=np.uint8), DEFAULTS, gen(18))
        for axis in (i, q):
            assert abs(axis.var() - 0.18**2) < 0.05 * 0.18**2


class TestClassify:
    def test_on_center(self):
        assert classify(IQPoint(0.0, 1.0), DEFAULTS) == ReadoutLevel.L1

    def test_near_ground_center(self):
        # squared distances at default centers: 0.02 vs 1.62 vs 3.62
        assert classify(IQPoint(0.9, 0.1), DEFAULTS) == ReadoutLevel.L0

    def test_tie_breaks_to_lowest_index(self):
        assert classify(IQPoint(0.5, 0.5), DEFAULTS) == ReadoutLevel.L0

    def test_translation_invariance(self):
        rng = gen(19)
        for _ in range(50):
            t = rng.standard_normal(2)
            pt = rng.standard_normal(2) * 2
            moved = NoiseParams(
                iq_centers=tuple(
                    IQPoint(c.i + t[0], c.q + t[1]) for c in DEFAULTS.iq_centers
                )
            )
            assert classify(IQPoint(*(pt + t)), moved) == classify(IQPoint(*pt), DEFAULTS)

    def test_vectorized_matches_scalar(self):
        rng = gen(20)
        i = rng.standard_normal(500)
        q = rng.standard_normal(500)
        vec = classify((i, q), DEFAULTS)
        for k in range(500):
            assert vec[k] == classify(IQPoint(i[k], q[k]), DEFAULTS)


class TestMisclassification:
    def test_separated_blobs(self):
        p = NoiseParams(iq_sigma=1e-6)
        assert estimate_misclassification(p, 10**6, gen(21)) == 0.0

    def test_overlapping_blobs_near_chance(self):
        p = NoiseParams(iq_sigma=10.0)
        assert estimate_misclassification(p, 10**6, gen(22)) > 0.5

    def test_default_rate_matches_calibration_target(self):
        # target 6e-5 within a factor of 2
        rate = estimate_misclassification(DEFAULTS, 10**8, gen(23))
        assert 3e-5 <= rate <= 1.2e-4

    def test_monotone_in_sigma(self):
        rates = [
            estimate_misclassification(NoiseParams(iq_sigma=s), 10**6, gen(24))
            for s in (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
        ]
        assert all(a <= b for a, b in zip(rates, rates[1:]))

    def test_sample_floor(self):
        with pytest.raises(ValidationError):
            estimate_misclassification(DEFAULTS, 10**5, gen(25))


class TestDeterminism:
    def test_all_sampling_ops_reproduce_with_same_seed(self):
        levels = np.array([0, 1, 2] * 100, dtype=np.uint8)
        probs = np.array([0.3, 0.3, 0.4])
        first = (
            thermal_init(DEFAULTS, gen(26), size=300),
            sample_level(probs, gen(27), size=300),
            apply_relaxation(levels, DEFAULTS, gen(28)),
            synth_iq(levels, DEFAULTS, gen(29)),
        )
        second = (
            thermal_init(DEFAULTS, gen(26), size=300),
            sample_level(probs, gen(27), size=300),
            apply_relaxation(levels, DEFAULTS, gen(28)),
            synth_iq(levels, DEFAULTS, gen(29)),
        )
        assert np.array_equal(first[0], second[0])
        assert np.array_equal(first[1], second[1])
        assert np.array_equal(first[2], second[2])
        assert np.array_equal(first[3][0], second[3][0])
        assert np.array_equal(first[3][1], second[3][1])
