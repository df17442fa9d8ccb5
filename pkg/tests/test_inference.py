"""Fit round-trips (noiseless and Monte-Carlo), model discrimination,
covariance validation, and the threshold-law ratio test."""

import numpy as np
import pytest

from pwave.channels import channel_params
from pwave.dynamics import DecayCurve, LossRates, simulate_decay, synthesize_noisy_curve
from pwave.inference import (
    CONSISTENT,
    VIOLATES,
    FitResult,
    RatePoint,
    fit_decay,
    fit_detuning,
    threshold_ratio,
)
from pwave.loss_model import g2_thermal_asymptotic, g2_thermal_exact
from pwave.trap import REFERENCE_TRAP, GasState

TRAP = REFERENCE_TRAP
T_UK = 10.0
GAS = GasState(1e5, T_UK)
TIMES = np.linspace(0.0, 0.5, 25)
G2_TRUE = 3e-12
L3_TRUE = 8e-26
CH_MID = channel_params("1/2,-1/2")
CH_LOW = channel_params("-1/2,-1/2")


def _curve(rates: LossRates) -> DecayCurve:
    return simulate_decay(GAS, rates, TRAP, TIMES)


def _rate_points(channel, db_g, temps, rel_sigma=0.05, noise_seed=None, use_exact=False):
    rng = np.random.default_rng(noise_seed) if noise_seed is not None else None
    points = []
    for t_uk in temps:
        delta = channel.mu * db_g
        if use_exact:
            value = g2_thermal_exact(t_uk, delta, channel)
        else:
            value = g2_thermal_asymptotic(t_uk, delta, channel).value
        measured = value
        if rng is not None:
            measured = value * max(1.0 + rel_sigma * rng.standard_normal(), 1e-3)
        points.append(RatePoint(t_uk, measured, rel_sigma * value))
    return points


class TestFitDecayNoiseless:
    def test_two_body_recovery(self):
        result = fit_decay(_curve(LossRates(g2=G2_TRUE)), TRAP, T_UK, model="two_body")
        assert result.converged
        assert result.parameters["g2"] == pytest.approx(G2_TRUE, rel=1e-4)
        assert result.parameters["n0"] == pytest.approx(GAS.n_atoms, rel=1e-6)

    def test_three_body_recovery(self):
        result = fit_decay(_curve(LossRates(l3=L3_TRUE)), TRAP, T_UK, model="three_body")
        assert result.converged
        assert result.parameters["l3"] == pytest.approx(L3_TRUE, rel=1e-4)

    def test_both_terms_recovery(self):
        result = fit_decay(
            _curve(LossRates(g2=G2_TRUE, l3=L3_TRUE)), TRAP, T_UK, model="both"
        )
        assert result.converged
        assert result.parameters["g2"] == pytest.approx(G2_TRUE, rel=1e-4)
        assert result.parameters["l3"] == pytest.approx(L3_TRUE, rel=1e-4)

    def test_absent_term_is_negligible(self):
        # Fitting both terms to pure two-body data: the three-body term must
        # contribute nothing significant to the initial loss rate.
        result = fit_decay(_curve(LossRates(g2=G2_TRUE)), TRAP, T_UK, model="both")
        assert result.parameters["g2"] == pytest.approx(G2_TRUE, rel=1e-4)
        from pwave.dynamics import rate_polynomial

        _c1, c2, c3 = rate_polynomial(
            LossRates(g2=result.parameters["g2"], l3=result.parameters["l3"]),
            TRAP,
            T_UK,
        )
        n0 = result.parameters["n0"]
        assert c3 * n0**2 < 1e-3 * c2 * n0

    def test_known_one_body_background(self):
        rates = LossRates(g2=G2_TRUE, one_body_rate=1.0 / 30.0)
        result = fit_decay(
            _curve(rates), TRAP, T_UK, model="two_body", one_body_rate=1.0 / 30.0
        )
        assert result.parameters["g2"] == pytest.approx(G2_TRUE, rel=1e-4)


class TestFitDecayErrors:
    def test_unknown_model(self):
        with pytest.raises(ValueError, match="model"):
            fit_decay(_curve(LossRates(g2=G2_TRUE)), TRAP, T_UK, model="four_body")

    def test_too_few_samples(self):
        t = np.linspace(0.0, 0.5, 4)
        curve = simulate_decay(GAS, LossRates(g2=G2_TRUE), TRAP, t)
        with pytest.raises(ValueError, match="5 samples"):
            fit_decay(curve, TRAP, T_UK)

    def test_degenerate_curve(self):
        curve = DecayCurve(times=TIMES, atoms=np.full_like(TIMES, 5e4))
        with pytest.raises(ValueError, match="constant"):
            fit_decay(curve, TRAP, T_UK)

    def test_nonpositive_sigma(self):
        base = _curve(LossRates(g2=G2_TRUE))
        sigma = np.full_like(base.atoms, 10.0)
        sigma[3] = 0.0
        curve = DecayCurve(times=base.times, atoms=base.atoms, sigma=sigma)
        with pytest.raises(ValueError, match="sigma"):
            fit_decay(curve, TRAP, T_UK)


class TestFitDecayMonteCarlo:
    def test_noisy_recovery_medians(self):
        # 5% multiplicative noise, both terms active: medians over 20 seeds
        # within 15%.
        base = _curve(LossRates(g2=G2_TRUE, l3=L3_TRUE))
        g2_err, l3_err = [], []
        for seed in range(20):
            noisy = synthesize_noisy_curve(base, 0.05, seed=seed)
            result = fit_decay(noisy, TRAP, T_UK, model="both")
            g2_err.append(abs(result.parameters["g2"] / G2_TRUE - 1.0))
            l3_err.append(abs(result.parameters["l3"] / L3_TRUE - 1.0))
        assert np.median(g2_err) <= 0.15
        assert np.median(l3_err) <= 0.15

    def test_model_discrimination(self):
        # A two-body-only fit to three-body data must fit far worse than the
        # matching model on the same data.
        base = _curve(LossRates(l3=L3_TRUE))
        noisy = synthesize_noisy_curve(base, 0.05, seed=3)
        wrong = fit_decay(noisy, TRAP, T_UK, model="two_body")
        right = fit_decay(noisy, TRAP, T_UK, model="three_body")
        assert wrong.residual_norm >= 5.0 * right.residual_norm

    def test_sigma_rescaling_leaves_parameters(self):
        base = _curve(LossRates(g2=G2_TRUE, l3=L3_TRUE))
        noisy = synthesize_noisy_curve(base, 0.05, seed=11)
        scaled = DecayCurve(
            times=noisy.times, atoms=noisy.atoms, sigma=noisy.sigma * 100.0
        )
        a = fit_decay(noisy, TRAP, T_UK, model="both")
        b = fit_decay(scaled, TRAP, T_UK, model="both")
        for name in ("n0", "g2", "l3"):
            assert b.parameters[name] == pytest.approx(
                a.parameters[name], rel=1e-6
            )
        # Covariance scales with sigma^2; the residual norm drops by 100^2.
        assert b.sigma("g2") == pytest.approx(100.0 * a.sigma("g2"), rel=1e-4)
        assert b.residual_norm == pytest.approx(a.residual_norm / 1e4, rel=1e-6)

    def test_covariance_matches_empirical_scatter(self):
        # Over 100 seeds the reported 1-sigma must track the true scatter
        # within a factor 2.
        base = _curve(LossRates(g2=G2_TRUE))
        fitted, reported = [], []
        for seed in range(100):
            noisy = synthesize_noisy_curve(base, 0.05, seed=1000 + seed)
            result = fit_decay(noisy, TRAP, T_UK, model="two_body")
            fitted.append(result.parameters["g2"])
            reported.append(result.sigma("g2"))
        empirical = np.std(fitted, ddof=1)
        typical_reported = np.median(reported)
        assert empirical <= 2.0 * typical_reported
        assert empirical >= typical_reported / 2.0


class TestFitResultShape:
    def test_names_and_covariance_alignment(self):
        result = fit_decay(
            _curve(LossRates(g2=G2_TRUE, l3=L3_TRUE)), TRAP, T_UK, model="both"
        )
        assert result.names == ("n0", "g2", "l3")
        assert result.covariance.shape == (3, 3)
        np.testing.assert_allclose(result.covariance, result.covariance.T)
        eigenvalues = np.linalg.eigvalsh(result.covariance)
        assert np.all(eigenvalues >= -1e-12 * np.max(np.abs(eigenvalues)))
        assert result.residual_norm >= 0.0
        assert isinstance(result, FitResult)


class TestFitDetuning:
    TEMPS = (3.0, 5.0, 8.0, 12.0, 15.0)

    @pytest.mark.parametrize("channel", [CH_MID, CH_LOW], ids=["mid", "low"])
    @pytest.mark.parametrize("db_g", [0.02, 0.04, 0.1, 0.3])
    def test_noiseless_round_trip(self, channel, db_g):
        points = _rate_points(channel, db_g, self.TEMPS, rel_sigma=0.01)
        result = fit_detuning(points, channel)
        assert result.converged
        assert result.parameters["db"] == pytest.approx(db_g, rel=1e-4)

    def test_exact_model_round_trip(self):
        points = _rate_points(CH_LOW, 0.04, self.TEMPS, use_exact=True)
        result = fit_detuning(points, CH_LOW, use_exact=True)
        assert result.parameters["db"] == pytest.approx(0.04, rel=1e-4)

    @pytest.mark.parametrize("db_g", [0.04, 0.3])
    def test_noisy_median_recovery(self, db_g):
        channel = CH_LOW if db_g == 0.04 else CH_MID
        errors = []
        for seed in range(20):
            points = _rate_points(
                channel, db_g, self.TEMPS, rel_sigma=0.10, noise_seed=seed
            )
            result = fit_detuning(points, channel)
            errors.append(abs(result.parameters["db"] / db_g - 1.0))
        assert np.median(errors) <= 0.20

    def test_cross_model_bound(self):
        # Data generated with the quadrature average, fitted with the closed
        # form: the recovered offset stays within 25% of truth.
        temps = (3.0, 5.0, 8.0, 11.0, 15.0)
        points = _rate_points(CH_MID, 0.3, temps, rel_sigma=0.01, use_exact=True)
        result = fit_detuning(points, CH_MID)
        assert result.parameters["db"] == pytest.approx(0.3, rel=0.25)

    def test_too_few_points(self):
        points = _rate_points(CH_MID, 0.1, (5.0, 10.0))
        with pytest.raises(ValueError, match="3 rate points"):
            fit_detuning(points, CH_MID)

    def test_identical_temperatures(self):
        points = [RatePoint(5.0, 1e-12, 1e-13) for _ in range(4)]
        with pytest.raises(ValueError, match="identical"):
            fit_detuning(points, CH_MID)

    def test_channel_without_model(self):
        points = _rate_points(CH_MID, 0.1, self.TEMPS)
        with pytest.raises(ValueError, match="two-body"):
            fit_detuning(points, channel_params("1/2,1/2"))

    def test_rate_point_validation(self):
        with pytest.raises(ValueError):
            RatePoint(5.0, 1e-12, 0.0)
        with pytest.raises(ValueError):
            RatePoint(-5.0, 1e-12, 1e-13)


class TestThresholdRatio:
    def test_bound_is_exact(self):
        verdict = threshold_ratio(1e-26, 1e-24, 2.0, 8.0, lambda_bound=2.0)
        assert verdict.bound == 0.0625

    def test_boundary_counts_consistent(self):
        bound = (2.0 / 8.0) ** 2.0
        verdict = threshold_ratio(bound * 1e-24, 1e-24, 2.0, 8.0)
        assert verdict.classification == CONSISTENT
        assert verdict.consistent

    def test_temperature_independent_violates(self):
        verdict = threshold_ratio(1e-24, 1e-24, 2.0, 8.0)
        assert verdict.ratio == 1.0
        assert verdict.classification == VIOLATES
        assert not verdict.consistent

    def test_below_bound_consistent(self):
        assert threshold_ratio(5e-26, 1e-24, 2.0, 8.0).consistent

    def test_validation(self):
        with pytest.raises(ValueError):
            threshold_ratio(-1e-26, 1e-24, 2.0, 8.0)
        with pytest.raises(ValueError, match="below"):
            threshold_ratio(1e-26, 1e-24, 8.0, 2.0)
        with pytest.raises(ValueError):
            threshold_ratio(1e-26, 1e-24, 2.0, 8.0, lambda_bound=0.0)
