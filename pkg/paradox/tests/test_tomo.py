import math

import numpy as np
from django.test import SimpleTestCase

from paradox.errors import ConfigError, MissingLabelError, ZeroTotalError
from paradox.hardy import hardy_density
from paradox.qstate import DensityOperator, fidelity, is_projector
from paradox.simlab import NoiseModel
from paradox.tomo import (
    TomographyConfig, concurrence_curve, measurement_matrix, mle_reconstruct, reconstruct_state,
    simulate_tomography, tomography_settings,
)


class SettingsTests(SimpleTestCase):
    def test_thirty_six_distinct_product_settings(self):
        settings = tomography_settings()
        self.assertEqual(len(settings), 36)
        self.assertEqual(len({s.label for s in settings}), 36)
        self.assertEqual(settings[0].label, 'p:Z+|o:Z+')

    def test_each_setting_is_a_projector(self):
        for setting in tomography_settings():
            self.assertTrue(is_projector(setting.projector))

    def test_settings_sum_to_nine_identity(self):
        total = sum(s.projector for s in tomography_settings())
        np.testing.assert_allclose(total, 9 * np.eye(4), atol=1e-14)

    def test_design_matrix_is_informationally_complete(self):
        self.assertEqual(np.linalg.matrix_rank(measurement_matrix()), 16)


class SimulateTomographyTests(SimpleTestCase):
    def test_eigenstate_setting_collects_every_count(self):
        counts = simulate_tomography(hardy_density(0.0), 1000, seed=0, exact=True)
        self.assertAlmostEqual(counts['p:Z+|o:Z-'], 1000.0, places=9)
        self.assertAlmostEqual(counts['p:Z-|o:Z-'], 0.0, places=9)

    def test_maximally_mixed_state_spreads_counts_evenly(self):
        counts = simulate_tomography(DensityOperator.maximally_mixed(4), 1000, seed=0, exact=True)
        for value in counts.values():
            self.assertAlmostEqual(value, 250.0, places=9)

    def test_poisson_counts_are_reproducible(self):
        rho = hardy_density(0.3)
        self.assertEqual(simulate_tomography(rho, 500, seed=4), simulate_tomography(rho, 500, seed=4))

    def test_non_positive_counts_per_setting_is_rejected(self):
        with self.assertRaises(ValueError):
            simulate_tomography(hardy_density(0.3), 0, seed=0)


class MLEReconstructionTests(SimpleTestCase):
    def test_exact_data_reconstructs_pure_state(self):
        target = hardy_density(math.pi / 8)
        result = mle_reconstruct(simulate_tomography(target, 1000, seed=0, exact=True))
        self.assertTrue(result.converged)
        self.assertGreaterEqual(fidelity(result.rho_hat, target), 0.9999)

    def test_maximally_mixed_data_reconstructs_identity(self):
        counts = simulate_tomography(DensityOperator.maximally_mixed(4), 10 ** 6, seed=12)
        result = mle_reconstruct(counts)
        np.testing.assert_allclose(result.rho_hat.entries, np.eye(4) / 4, atol=1e-3)

    def test_likelihood_never_decreases(self):
        counts = simulate_tomography(hardy_density(0.5), 300, seed=8)
        history = mle_reconstruct(counts).history
        self.assertTrue(all(b >= a for a, b in zip(history, history[1:])))

    def test_missing_setting_is_reported(self):
        counts = simulate_tomography(hardy_density(0.5), 300, seed=8)
        counts.pop('p:X+|o:Y-')
        with self.assertRaises(MissingLabelError):
            mle_reconstruct(counts)

    def test_all_zero_counts_are_rejected(self):
        counts = {s.label: 0 for s in tomography_settings()}
        with self.assertRaises(ZeroTotalError):
            mle_reconstruct(counts)

    def test_finite_counts_at_large_scale_reach_high_fidelity(self):
        target = hardy_density(math.pi / 8)
        for seed in range(10):
            with self.subTest(seed=seed):
                result = mle_reconstruct(simulate_tomography(target, 10 ** 6, seed=seed))
                self.assertTrue(result.converged)
                self.assertGreaterEqual(fidelity(result.rho_hat, target), 0.9999)

    def test_boundary_angles_reach_high_fidelity(self):
        for gamma in (0.0, math.pi / 4):
            for seed in (11, 12, 13):
                with self.subTest(gamma=gamma, seed=seed):
                    _, result = reconstruct_state(gamma, 10 ** 6, seed=seed)
                    self.assertTrue(result.converged)
                    self.assertGreaterEqual(fidelity(result.rho_hat, hardy_density(gamma)), 0.9999)

    def test_estimate_is_at_least_as_likely_as_the_true_state(self):
        target = hardy_density(math.pi / 8)
        settings = tomography_settings()
        for seed in (7, 11):
            with self.subTest(seed=seed):
                counts = simulate_tomography(target, 10 ** 6, seed=seed)
                truth = sum(
                    counts[s.label] * math.log(np.trace(s.projector @ target.entries).real / 9)
                    for s in settings if counts[s.label] > 0
                )
                self.assertGreaterEqual(mle_reconstruct(counts).log_likelihood, truth - 1e-6)

    def test_iteration_cap_is_reported_as_not_converged(self):
        counts = simulate_tomography(hardy_density(0.5), 10 ** 4, seed=3)
        result = mle_reconstruct(counts, max_iterations=1)
        self.assertFalse(result.converged)
        self.assertEqual(result.iterations, 1)

    def test_depolarized_state_lands_near_published_fidelity(self):
        _, result = reconstruct_state(math.radians(24.9), 10 ** 4, NoiseModel(depolarizing_p=0.03), seed=2)
        value = fidelity(result.rho_hat, hardy_density(math.radians(24.9)))
        self.assertGreaterEqual(value, 0.96)
        self.assertLessEqual(value, 0.99)

    def test_median_fidelity_improves_with_counts(self):
        gamma = math.pi / 8
        medians = []
        for counts_per_setting in (10 ** 3, 10 ** 4, 10 ** 6):
            values = [
                fidelity(reconstruct_state(gamma, counts_per_setting, seed=seed)[1].rho_hat, hardy_density(gamma))
                for seed in range(20)
            ]
            medians.append(float(np.median(values)))
        self.assertLess(medians[0], medians[1])
        self.assertLess(medians[1], medians[2])


class ConcurrenceCurveTests(SimpleTestCase):
    def test_curve_follows_sin_two_gamma(self):
        grid = np.linspace(0.0, math.pi / 4, 7)
        points = concurrence_curve(grid, 10 ** 5, seed=30)
        self.assertEqual(len(points), 7)
        for point in points:
            self.assertAlmostEqual(point.concurrence, point.theory, delta=0.02)
        self.assertLess(points[0].concurrence, 0.02)
        self.assertGreater(points[-1].concurrence, 0.98)


class TomographyConfigTests(SimpleTestCase):
    def test_sweep_in_degrees_is_converted(self):
        cfg = TomographyConfig.from_dict({'gamma_deg': 22.5, 'sweep_gammas_deg': [0, 45], 'seed': 1})
        self.assertAlmostEqual(cfg.gamma, math.pi / 8, places=15)
        self.assertAlmostEqual(cfg.sweep_gammas[1], math.pi / 4, places=15)

    def test_override_frequencies_are_rejected(self):
        with self.assertRaises(ConfigError):
            TomographyConfig.from_dict({'gamma_deg': 22.5, 'noise': {'override_frequencies': [0, 0, 0, 0.09]}})

    def test_non_positive_counts_are_rejected(self):
        with self.assertRaises(ConfigError):
            TomographyConfig.from_dict({'gamma_deg': 22.5, 'counts_per_setting': 0})
