"""Trap geometry, density moments, and their brute-force 3-D quadrature
oracle."""

import math

import numpy as np
import pytest

from pwave import constants
from pwave.trap import (
    REFERENCE_TRAP,
    GasState,
    TrapConfig,
    density_moment,
    density_prefactor,
    fermi_temperature,
    mean_geometric_frequency,
    peak_density,
)

TWO_PI = 2.0 * math.pi


def _oracle_density_integrals(trap: TrapConfig, gas: GasState):
    """Brute-force 3-D tensor-grid quadrature of the Boltzmann profile.

    Returns (n0, <n>, <n^2>) in cm^-3 powers, computed from
    n(r) = n0 exp(-sum_i x_i^2 / (2 s_i^2)), s_i^2 = k_B T / (m w_i^2),
    with Gauss-Legendre nodes on [-8s, 8s] per axis.  Independent of the
    closed forms under test (those never integrate anything).
    """
    kbt = constants.uk_to_joule(gas.temperature)
    sigmas = [
        math.sqrt(kbt / trap.mass) / w
        for w in (trap.omega_x, trap.omega_y, trap.omega_z)
    ]
    nodes, weights = np.polynomial.legendre.leggauss(80)
    axes = []
    for s in sigmas:
        x = nodes * 8.0 * s
        w = weights * 8.0 * s
        axes.append((x, w))
    (x, wx), (y, wy), (z, wz) = axes
    profile = np.exp(
        -(
            (x[:, None, None] ** 2) / (2 * sigmas[0] ** 2)
            + (y[None, :, None] ** 2) / (2 * sigmas[1] ** 2)
            + (z[None, None, :] ** 2) / (2 * sigmas[2] ** 2)
        )
    )
    w3 = wx[:, None, None] * wy[None, :, None] * wz[None, None, :]
    norm = float(np.sum(profile * w3))  # integral of exp(-U/kT), in m^3
    n0_si = gas.n_atoms / norm  # atoms / m^3
    mom1 = n0_si**2 * float(np.sum(profile**2 * w3)) / gas.n_atoms
    mom2 = n0_si**3 * float(np.sum(profile**3 * w3)) / gas.n_atoms
    cm = constants.M3_DENSITY_TO_CM3
    return n0_si * cm, mom1 * cm, mom2 * cm**2


class TestTrapConfig:
    def test_from_hz_converts_to_angular(self):
        trap = TrapConfig.from_hz(100.0, 200.0, 300.0)
        assert trap.omega_x == pytest.approx(TWO_PI * 100.0, rel=1e-15)
        assert trap.omega_z == pytest.approx(TWO_PI * 300.0, rel=1e-15)
        assert trap.mass == pytest.approx(
            6.0151228874 * constants.ATOMIC_MASS_KG, rel=1e-12
        )

    def test_reference_trap(self):
        assert REFERENCE_TRAP.omega_x == pytest.approx(TWO_PI * 2400.0)
        assert REFERENCE_TRAP.omega_y == pytest.approx(TWO_PI * 5000.0)
        assert REFERENCE_TRAP.omega_z == pytest.approx(TWO_PI * 5500.0)

    @pytest.mark.parametrize("bad", [{"omega_x": 0.0}, {"omega_y": -1.0}, {"mass": 0.0}])
    def test_rejects_nonpositive(self, bad):
        fields = dict(omega_x=1.0, omega_y=1.0, omega_z=1.0, mass=1e-26)
        fields.update(bad)
        with pytest.raises(ValueError):
            TrapConfig(**fields)

    def test_depth_is_documentation_only(self):
        a = TrapConfig.from_hz(100.0, 100.0, 100.0)
        b = TrapConfig.from_hz(100.0, 100.0, 100.0, depth_uk=150.0)
        assert density_prefactor(a, 5.0) == density_prefactor(b, 5.0)


class TestGasState:
    def test_rejects_negative_atoms(self):
        with pytest.raises(ValueError):
            GasState(-1.0, 5.0)

    def test_rejects_nonpositive_temperature(self):
        with pytest.raises(ValueError):
            GasState(1e5, 0.0)

    def test_zero_atoms_allowed(self):
        assert GasState(0.0, 5.0).n_atoms == 0.0


class TestMeanGeometricFrequency:
    def test_identity(self):
        trap = TrapConfig(1000.0, 1000.0, 1000.0)
        assert mean_geometric_frequency(trap) == pytest.approx(1000.0, rel=1e-15)

    def test_reference_value(self):
        # Cube root of the product: 2 pi x 4.0412 kHz.
        assert mean_geometric_frequency(REFERENCE_TRAP) == pytest.approx(
            TWO_PI * 4041.2 , rel=1e-4
        )

    def test_homogeneity(self):
        trap = TrapConfig(100.0, 300.0, 700.0)
        scaled = TrapConfig(300.0, 900.0, 2100.0)
        assert mean_geometric_frequency(scaled) == pytest.approx(
            3.0 * mean_geometric_frequency(trap), rel=1e-14
        )


class TestFermiTemperature:
    def test_cube_root_scaling(self):
        t1 = fermi_temperature(REFERENCE_TRAP, 1e5)
        t8 = fermi_temperature(REFERENCE_TRAP, 8e5)
        assert t8 == pytest.approx(2.0 * t1, rel=1e-14)

    def test_reference_value(self):
        # Direct evaluation with CODATA constants: 16.358 uK for 1e5 atoms.
        assert fermi_temperature(REFERENCE_TRAP, 1e5) == pytest.approx(
            16.358286435312408, rel=1e-12
        )

    def test_degeneracy_ratio(self):
        ratio = 5.0 / fermi_temperature(REFERENCE_TRAP, 1e5)
        assert ratio == pytest.approx(0.31, abs=0.005)

    def test_rejects_zero_atoms(self):
        with pytest.raises(ValueError):
            fermi_temperature(REFERENCE_TRAP, 0.0)


class TestDensities:
    def test_empty_trap(self):
        gas = GasState(0.0, 10.0)
        assert peak_density(REFERENCE_TRAP, gas) == 0.0
        assert density_moment(REFERENCE_TRAP, gas, 1) == 0.0
        assert density_moment(REFERENCE_TRAP, gas, 2) == 0.0

    def test_temperature_power_law(self):
        n1 = peak_density(REFERENCE_TRAP, GasState(1e5, 10.0))
        n2 = peak_density(REFERENCE_TRAP, GasState(1e5, 20.0))
        assert n2 == pytest.approx(n1 * 2.0**-1.5, rel=1e-14)

    def test_moment_ratios(self):
        gas = GasState(1e5, 10.0)
        n0 = peak_density(REFERENCE_TRAP, gas)
        assert density_moment(REFERENCE_TRAP, gas, 1) / n0 == pytest.approx(
            2.0**-1.5, rel=1e-15
        )
        assert density_moment(REFERENCE_TRAP, gas, 2) / n0**2 == pytest.approx(
            3.0**-1.5, rel=1e-15
        )

    def test_moment_ratio_analytic(self):
        # <n^2>/<n>^2 = (4/3)^(3/2) for the Gaussian profile.
        gas = GasState(3e4, 7.0)
        ratio = density_moment(REFERENCE_TRAP, gas, 2) / density_moment(
            REFERENCE_TRAP, gas, 1
        ) ** 2
        assert ratio == pytest.approx((4.0 / 3.0) ** 1.5, rel=1e-13)

    def test_moment_order_validated(self):
        with pytest.raises(ValueError):
            density_moment(REFERENCE_TRAP, GasState(1e5, 10.0), 3)

    def test_against_quadrature_oracle_reference(self):
        gas = GasState(1e5, 10.0)
        n0_oracle, m1_oracle, m2_oracle = _oracle_density_integrals(
            REFERENCE_TRAP, gas
        )
        assert peak_density(REFERENCE_TRAP, gas) == pytest.approx(
            n0_oracle, rel=1e-6
        )
        assert density_moment(REFERENCE_TRAP, gas, 1) == pytest.approx(
            m1_oracle, rel=1e-6
        )
        assert density_moment(REFERENCE_TRAP, gas, 2) == pytest.approx(
            m2_oracle, rel=1e-6
        )

    def test_against_quadrature_oracle_randomized(self):
        rng = np.random.default_rng(2024)
        for _ in range(10):
            nu = rng.uniform(200.0, 8000.0, size=3)
            mass_amu = rng.uniform(1.0, 90.0)
            trap = TrapConfig.from_hz(*nu, mass_amu=mass_amu)
            gas = GasState(rng.uniform(1e3, 5e5), rng.uniform(0.5, 40.0))
            n0_oracle, m1_oracle, m2_oracle = _oracle_density_integrals(trap, gas)
            assert peak_density(trap, gas) == pytest.approx(n0_oracle, rel=1e-6)
            assert density_moment(trap, gas, 1) == pytest.approx(m1_oracle, rel=1e-6)
            assert density_moment(trap, gas, 2) == pytest.approx(m2_oracle, rel=1e-6)
