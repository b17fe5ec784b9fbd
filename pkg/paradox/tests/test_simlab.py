import logging
import math

import numpy as np
from django.test import SimpleTestCase

from paradox.errors import ConfigError, GammaRangeError, MissingLabelError, NoiseParameterError, ZeroTotalError
from paradox.hardy import PARADOX_EVENT, HardyEvent, hardy_density, hardy_p4_closed_form
from paradox.qstate import DensityOperator, born_probability, validate_physical
from paradox.simlab import (
    CountRecord, ExperimentConfig, FrequencyEstimate, NoiseModel, apply_noise, basis_projectors,
    estimate_frequencies, hardy_projectors, label_rng, power_summary, replicate, simulate_counts,
    simulate_experiment, transform_probabilities, violation_statistic,
)

OPTIMUM = math.radians(24.9)
# published Hardy-event frequencies with their Poisson errors, in event order
PUBLISHED = ((0.021, 0.001), (0.0045, 0.0006), (0.010, 0.001), (0.074, 0.002))


def _published_estimates():
    return {
        event.label: FrequencyEstimate(event.label, f, sigma)
        for event, (f, sigma) in zip(HardyEvent, PUBLISHED)
    }


class LabelStreamTests(SimpleTestCase):
    def test_same_seed_and_label_reproduce_stream(self):
        a = label_rng(5, 'L,+1').integers(0, 1 << 30, size=4)
        b = label_rng(5, 'L,+1').integers(0, 1 << 30, size=4)
        np.testing.assert_array_equal(a, b)

    def test_labels_get_distinct_streams(self):
        a = label_rng(5, 'L,+1').integers(0, 1 << 30, size=4)
        b = label_rng(5, 'L,-1').integers(0, 1 << 30, size=4)
        self.assertFalse(np.array_equal(a, b))


class NoiseModelTests(SimpleTestCase):
    def test_out_of_range_parameters_are_rejected(self):
        with self.assertRaises(NoiseParameterError):
            NoiseModel(depolarizing_p=1.5)
        with self.assertRaises(NoiseParameterError):
            NoiseModel(crosstalk_eps=-0.1)

    def test_override_needs_four_entries(self):
        with self.assertRaises(NoiseParameterError):
            NoiseModel(override_frequencies=(0.1, 0.2))

    def test_full_depolarization_gives_maximally_mixed_state(self):
        rho = apply_noise(hardy_density(OPTIMUM), NoiseModel(depolarizing_p=1.0))
        np.testing.assert_allclose(rho.entries, np.eye(4) / 4, atol=1e-15)

    def test_depolarization_leaks_into_first_event(self):
        rho = apply_noise(hardy_density(OPTIMUM), NoiseModel(depolarizing_p=0.084))
        proj = hardy_projectors(OPTIMUM)['sigma,lambda(+1,+1)']
        self.assertAlmostEqual(born_probability(rho, proj), 0.021, delta=1e-9)

    def test_crosstalk_mixes_toward_uniform(self):
        out = transform_probabilities([0.0, 1.0, 0.0, 0.0], NoiseModel(crosstalk_eps=0.2))
        np.testing.assert_allclose(out, [0.05, 0.85, 0.05, 0.05])

    def test_override_replaces_vector(self):
        noise = NoiseModel(override_frequencies=(0.1, 0.2, 0.3, 0.4))
        np.testing.assert_allclose(transform_probabilities([0.0] * 4, noise), [0.1, 0.2, 0.3, 0.4])
        with self.assertRaises(NoiseParameterError):
            transform_probabilities([0.0] * 3, noise)

    def test_override_by_label_leaves_other_projectors_alone(self):
        noise = NoiseModel(override_frequencies=(0.1, 0.2, 0.3, 0.4))
        out = transform_probabilities([0.5, 0.5], noise, labels=['L,+1', "sigma',lambda'(-1,-1)"])
        np.testing.assert_allclose(out, [0.5, 0.4])

    def test_from_dict_accepts_labelled_override(self):
        noise = NoiseModel.from_dict({'override_frequencies': {
            'sigma,lambda(+1,+1)': 0.021, "sigma',lambda(-1,-1)": 0.0045,
            "sigma,lambda'(-1,-1)": 0.010, "sigma',lambda'(-1,-1)": 0.074,
        }})
        self.assertEqual(noise.override_frequencies, (0.021, 0.0045, 0.010, 0.074))

    def test_depolarization_keeps_state_physical_across_range(self):
        for p in np.linspace(0.0, 1.0, 21):
            with self.subTest(p=p):
                rho = apply_noise(hardy_density(OPTIMUM), NoiseModel(depolarizing_p=float(p)))
                self.assertIsInstance(validate_physical(rho.entries), DensityOperator)


class ExperimentConfigTests(SimpleTestCase):
    def test_zero_window_is_a_config_error(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig(gamma=OPTIMUM, window=0.0)

    def test_gamma_outside_paradox_interval_is_rejected(self):
        with self.assertRaises(GammaRangeError):
            ExperimentConfig(gamma=1.0)

    def test_from_dict_reads_degrees_and_nested_noise(self):
        cfg = ExperimentConfig.from_dict({'gamma_deg': 24.9, 'seed': 3, 'noise': {'depolarizing_p': 0.05}})
        self.assertAlmostEqual(cfg.gamma, OPTIMUM, places=15)
        self.assertEqual(cfg.seed, 3)
        self.assertEqual(cfg.noise.depolarizing_p, 0.05)
        self.assertEqual(cfg.expected_total, 12000.0)

    def test_explicit_seed_overrides_file_seed(self):
        self.assertEqual(ExperimentConfig.from_dict({'gamma_deg': 24.9, 'seed': 3}, seed=11).seed, 11)

    def test_unknown_key_is_rejected(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'gamma_deg': 24.9, 'windw': 10})

    def test_missing_gamma_is_rejected(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'window': 10})


class FrequencyTests(SimpleTestCase):
    def test_poisson_error_of_single_count(self):
        est = estimate_frequencies([CountRecord('x', 888, 100.0)], 12000)['x']
        self.assertAlmostEqual(est.frequency, 0.074, places=15)
        self.assertAlmostEqual(est.sigma, math.sqrt(888) / 12000, places=15)

    def test_zero_total_is_rejected(self):
        with self.assertRaises(ZeroTotalError):
            estimate_frequencies([CountRecord('x', 0, 100.0)], 0)

    def test_negative_counts_are_rejected(self):
        with self.assertRaises(ValueError):
            CountRecord('x', -1, 100.0)

    def test_rate_is_counts_over_window(self):
        self.assertEqual(CountRecord('x', 250, 100.0).rate_hz, 2.5)

    def test_zero_counts_are_logged_below_warning(self):
        records = [CountRecord(event.label, 0, 100.0) for event in HardyEvent]
        with self.assertLogs('paradox.simlab', level='DEBUG') as logs:
            estimate_frequencies(records, 12000)
        self.assertEqual(len(logs.records), 4)
        self.assertTrue(all(r.levelno < logging.WARNING for r in logs.records))


class ViolationStatisticTests(SimpleTestCase):
    def test_published_frequencies_exceed_seven_sigma(self):
        report = violation_statistic(_published_estimates())
        self.assertAlmostEqual(report.gap, 0.0385, delta=1e-12)
        self.assertAlmostEqual(report.gap_sigma, math.sqrt(0.0636) / 100, delta=1e-12)
        self.assertGreaterEqual(report.n_sigmas, 7)
        self.assertAlmostEqual(report.n_sigmas, 15.27, delta=0.01)
        self.assertTrue(report.violated)
        self.assertLess(report.p_value, 1e-12)

    def test_missing_label_is_reported(self):
        estimates = _published_estimates()
        del estimates["sigma',lambda(-1,-1)"]
        with self.assertRaises(MissingLabelError):
            violation_statistic(estimates)

    def test_zero_uncertainty_leaves_significance_undefined(self):
        estimates = {e.label: FrequencyEstimate(e.label, 0.0, 0.0, counts=0) for e in HardyEvent}
        report = violation_statistic(estimates)
        self.assertIsNone(report.n_sigmas)
        self.assertIsNone(report.p_value)
        self.assertEqual(len(report.degenerate_labels), 4)

    def test_extra_labels_are_ignored(self):
        estimates = _published_estimates()
        estimates['L,+1'] = FrequencyEstimate('L,+1', 0.5, 0.01)
        self.assertAlmostEqual(violation_statistic(estimates).gap, 0.0385, delta=1e-12)

    def test_frequency_above_one_is_accepted(self):
        estimates = {e.label: FrequencyEstimate(e.label, 0.0, 0.0, counts=0) for e in HardyEvent}
        estimates["sigma',lambda'(-1,-1)"] = FrequencyEstimate("sigma',lambda'(-1,-1)", 1.02, 0.0083, counts=12240)
        report = violation_statistic(estimates)
        self.assertAlmostEqual(report.gap, 1.02, places=15)
        self.assertTrue(report.violated)


class SimulationTests(SimpleTestCase):
    def test_impossible_events_yield_zero_counts_without_noise(self):
        cfg = ExperimentConfig(gamma=OPTIMUM, seed=1)
        records = {r.projector_label: r.counts for r in simulate_counts(cfg, hardy_projectors(OPTIMUM))}
        self.assertEqual(records['sigma,lambda(+1,+1)'], 0)
        self.assertEqual(records["sigma',lambda(-1,-1)"], 0)
        self.assertEqual(records["sigma,lambda'(-1,-1)"], 0)
        self.assertGreater(records["sigma',lambda'(-1,-1)"], 900)

    def test_same_config_reproduces_counts(self):
        cfg = ExperimentConfig(gamma=OPTIMUM, seed=42, noise=NoiseModel(depolarizing_p=0.05))
        self.assertEqual(simulate_experiment(cfg).count_rows(), simulate_experiment(cfg).count_rows())

    def test_projector_order_does_not_change_counts(self):
        cfg = ExperimentConfig(gamma=OPTIMUM, seed=9)
        forward = basis_projectors()
        backward = dict(reversed(list(forward.items())))
        a = {r.projector_label: r.counts for r in simulate_counts(cfg, forward)}
        b = {r.projector_label: r.counts for r in simulate_counts(cfg, backward)}
        self.assertEqual(a, b)

    def test_published_override_is_significant(self):
        cfg = ExperimentConfig(
            gamma=OPTIMUM, seed=3, noise=NoiseModel(override_frequencies=tuple(f for f, _ in PUBLISHED)),
        )
        report = simulate_experiment(cfg).report
        self.assertGreaterEqual(report.n_sigmas, 7)

    def test_certain_paradox_event_runs_for_every_seed(self):
        noise = NoiseModel(override_frequencies=(0.0, 0.0, 0.0, 1.0))
        for seed in range(20):
            with self.subTest(seed=seed):
                report = simulate_experiment(ExperimentConfig(gamma=OPTIMUM, seed=seed, noise=noise)).report
                self.assertGreater(report.gap, 0.9)

    def test_replicate_requires_a_run(self):
        with self.assertRaises(ConfigError):
            replicate(ExperimentConfig(gamma=OPTIMUM), 0)


class CountScaleTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.runs = replicate(ExperimentConfig(gamma=OPTIMUM, seed=1000), 1000)

    def test_runs_use_consecutive_seeds(self):
        self.assertEqual([r.config.seed for r in self.runs[:3]], [1000, 1001, 1002])

    def test_total_counts_match_expected_scale(self):
        totals = np.array([r.n_total for r in self.runs], dtype=float)
        self.assertAlmostEqual(math.sqrt(12000), 110, delta=110 * 0.02)
        self.assertAlmostEqual(totals.mean(), 12000, delta=20)
        self.assertAlmostEqual(totals.std(ddof=1), 110, delta=11)

    def test_nearly_every_run_exceeds_seven_sigma(self):
        summary = power_summary(self.runs)
        self.assertGreaterEqual(summary['fraction_significant'], 0.99)
        self.assertEqual(summary['runs'], 1000)

    def test_mean_paradox_frequency_matches_born_rule(self):
        label = PARADOX_EVENT.label
        values = np.array([r.report.estimates[label].frequency for r in self.runs])
        standard_error = values.std(ddof=1) / math.sqrt(len(values))
        expected = hardy_p4_closed_form(OPTIMUM)
        self.assertAlmostEqual(expected, 0.0902, delta=1e-4)
        self.assertLessEqual(abs(values.mean() - expected), 4 * standard_error)
