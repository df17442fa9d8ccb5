"""Two-path magneto-association: protocol validation, molecule-fraction
arithmetic, and the path-count identity."""

import math

import numpy as np
import pytest

from pwave.channels import channel_params
from pwave.ramp import (
    MIN_RAMP_STEPS,
    MoleculeFraction,
    PathCounts,
    RampProtocol,
    molecule_fraction,
    run_two_path,
)
from pwave.trap import REFERENCE_TRAP, GasState

CH_MID = channel_params("1/2,-1/2")
CH_LOW = channel_params("-1/2,-1/2")
GAS = GasState(1e5, 10.0)


class TestRampProtocol:
    def test_defaults_valid_for_mid_channel(self):
        RampProtocol().validate_for(CH_MID)

    def test_defaults_invalid_for_low_channel(self):
        # The default field set straddles the 186 G resonance, far below the
        # 215 G one.
        with pytest.raises(ValueError):
            RampProtocol().validate_for(CH_LOW)

    def test_low_channel_protocol(self):
        protocol = RampProtocol(
            b_start=220.0, b_nuc=214.0, b_dissoc=230.0, b_deep=205.0
        )
        protocol.validate_for(CH_LOW)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"b_deep": 186.0},        # deep hold above nucleation
            {"b_nuc": 191.0},         # nucleation above start
            {"b_start": 184.0},       # start below resonance
            {"b_dissoc": 184.0},      # dissociation below resonance
            {"b_nuc": 187.0},         # nucleation above resonance
        ],
    )
    def test_bad_orderings_rejected(self, kwargs):
        with pytest.raises(ValueError):
            RampProtocol(**kwargs).validate_for(CH_MID)

    def test_nonpositive_durations_rejected(self):
        with pytest.raises(ValueError):
            RampProtocol(t_assoc=0.0).validate_for(CH_MID)
        with pytest.raises(ValueError):
            RampProtocol(t_path=-1e-3).validate_for(CH_MID)


class TestPathCounts:
    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            PathCounts(-1.0, 10.0, 5e4, 10.0)
        with pytest.raises(ValueError):
            PathCounts(5e4, -1.0, 5e4, 10.0)

    def test_fields(self):
        counts = PathCounts(4e4, 100.0, 5e4, 120.0)
        assert counts.n1 == 4e4
        assert counts.sigma2 == 120.0


class TestMoleculeFraction:
    def test_reference_counts(self):
        # 71(5)k survivors through the resonance vs 91(7)k around it.
        result = molecule_fraction(PathCounts(71000.0, 5000.0, 91000.0, 7000.0))
        assert result.fraction == pytest.approx(0.21978021978021978, rel=1e-12)
        assert result.sigma == pytest.approx(0.08136945427630687, rel=1e-12)
        assert result.molecules == pytest.approx(10000.0, rel=1e-12)

    def test_equal_counts_give_zero(self):
        result = molecule_fraction(PathCounts(5e4, 100.0, 5e4, 100.0))
        assert result.fraction == 0.0
        assert result.molecules == 0.0

    def test_total_conversion(self):
        result = molecule_fraction(PathCounts(0.0, 0.0, 5e4, 100.0))
        assert result.fraction == 1.0
        assert math.isfinite(result.sigma)
        assert result.molecules == 2.5e4

    def test_scale_invariance_of_fraction(self):
        a = molecule_fraction(PathCounts(3e4, 2100.0, 5e4, 3500.0))
        b = molecule_fraction(PathCounts(3e3, 210.0, 5e3, 350.0))
        assert b.fraction == pytest.approx(a.fraction, rel=1e-12)
        assert b.sigma == pytest.approx(a.sigma, rel=1e-12)
        assert b.molecules == pytest.approx(a.molecules / 10.0, rel=1e-12)

    def test_zero_reference_count_rejected(self):
        with pytest.raises(ValueError):
            molecule_fraction(PathCounts(1e4, 100.0, 0.0, 0.0))

    def test_sigma_propagation(self):
        n1, s1, n2, s2 = 3e4, 500.0, 5e4, 800.0
        expected = math.hypot(s1 / n2, n1 * s2 / n2**2)
        result = molecule_fraction(PathCounts(n1, s1, n2, s2))
        assert result.sigma == pytest.approx(expected, rel=1e-12)

    def test_is_named_tuple(self):
        result = molecule_fraction(PathCounts(3e4, 500.0, 5e4, 800.0))
        assert isinstance(result, MoleculeFraction)
        fraction, sigma, molecules = result
        assert fraction == result.fraction


class TestRunTwoPath:
    def test_lossless_identity(self):
        # Without field-dependent losses the measured fraction must equal the
        # conversion efficiency to machine precision.
        for efficiency in (0.0, 0.1, 0.22, 0.5, 0.9, 1.0):
            counts = run_two_path(
                RampProtocol(),
                efficiency,
                GAS,
                CH_MID,
                REFERENCE_TRAP,
                include_losses=False,
            )
            result = molecule_fraction(counts)
            assert abs(result.fraction - efficiency) <= 1e-12

    def test_lossy_reference_fraction(self):
        counts = run_two_path(
            RampProtocol(), 0.22, GAS, CH_MID, REFERENCE_TRAP
        )
        result = molecule_fraction(counts)
        assert 0.15 <= result.fraction <= 0.25

    def test_path_through_resonance_loses_more(self):
        # Path 1 crosses the loss feature twice; for any appreciable
        # conversion it must end with fewer atoms than path 2.
        for efficiency in (0.05, 0.1, 0.22, 0.5, 0.9):
            counts = run_two_path(
                RampProtocol(), efficiency, GAS, CH_MID, REFERENCE_TRAP
            )
            assert counts.n2 >= counts.n1

    def test_reported_sigma_tracks_counts(self):
        counts = run_two_path(
            RampProtocol(), 0.22, GAS, CH_MID, REFERENCE_TRAP, noise_fraction=0.07
        )
        assert counts.sigma1 == pytest.approx(0.07 * counts.n1, rel=1e-12)
        assert counts.sigma2 == pytest.approx(0.07 * counts.n2, rel=1e-12)

    def test_step_count_floor(self):
        # Requests below the floor are clamped, so the output is unchanged.
        a = run_two_path(
            RampProtocol(), 0.22, GAS, CH_MID, REFERENCE_TRAP, steps_per_ramp=5
        )
        b = run_two_path(
            RampProtocol(),
            0.22,
            GAS,
            CH_MID,
            REFERENCE_TRAP,
            steps_per_ramp=MIN_RAMP_STEPS,
        )
        assert a.n1 == b.n1
        assert a.n2 == b.n2

    def test_seeded_jitter_is_deterministic(self):
        kwargs = dict(
            efficiency=0.22,
            initial=GAS,
            channel=CH_MID,
            trap=REFERENCE_TRAP,
            seed=7,
        )
        a = run_two_path(RampProtocol(), **kwargs)
        b = run_two_path(RampProtocol(), **kwargs)
        assert a.n1 == b.n1 and a.n2 == b.n2
        c = run_two_path(RampProtocol(), **{**kwargs, "seed": 8})
        assert c.n1 != a.n1

    def test_unseeded_is_noiseless(self):
        a = run_two_path(RampProtocol(), 0.22, GAS, CH_MID, REFERENCE_TRAP)
        b = run_two_path(RampProtocol(), 0.22, GAS, CH_MID, REFERENCE_TRAP)
        assert a.n1 == b.n1 and a.n2 == b.n2

    def test_jitter_sigma_unchanged(self):
        seeded = run_two_path(
            RampProtocol(), 0.22, GAS, CH_MID, REFERENCE_TRAP, seed=7
        )
        assert seeded.sigma1 == pytest.approx(0.07 * seeded.n1, rel=1e-12)

    def test_efficiency_range(self):
        with pytest.raises(ValueError):
            run_two_path(RampProtocol(), -0.1, GAS, CH_MID, REFERENCE_TRAP)
        with pytest.raises(ValueError):
            run_two_path(RampProtocol(), 1.1, GAS, CH_MID, REFERENCE_TRAP)

    def test_noise_fraction_range(self):
        with pytest.raises(ValueError):
            run_two_path(
                RampProtocol(), 0.2, GAS, CH_MID, REFERENCE_TRAP, noise_fraction=-0.01
            )

    def test_requires_two_body_channel(self):
        with pytest.raises(ValueError):
            run_two_path(
                RampProtocol(b_start=164.0, b_nuc=158.5, b_dissoc=175.0, b_deep=150.0),
                0.2,
                GAS,
                channel_params("1/2,1/2"),
                REFERENCE_TRAP,
            )
