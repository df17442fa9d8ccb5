"""Harmonic-trap geometry and classical (Boltzmann) density moments.

The gas is held in a three-frequency harmonic trap.  All density-related
quantities follow from the classical Boltzmann profile

    n(r) = n0 exp(-U(r) / k_B T),   U(r) = m/2 (wx^2 x^2 + wy^2 y^2 + wz^2 z^2),

which the loss analysis uses even at T/T_F ~ 0.3-0.5; quantum-degeneracy
corrections are deliberately out of scope.  Densities are returned in cm^-3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import constants


@dataclass(frozen=True)
class TrapConfig:
    """Harmonic trap: angular frequencies in rad/s, atomic mass in kg.

    `depth_uk` is recorded for documentation only and enters no formula.
    """

    omega_x: float
    omega_y: float
    omega_z: float
    mass: float = constants.LI6_MASS_KG
    depth_uk: float | None = None

    def __post_init__(self):
        for name in ("omega_x", "omega_y", "omega_z", "mass"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    @classmethod
    def from_hz(
        cls,
        nu_x: float,
        nu_y: float,
        nu_z: float,
        mass_amu: float = constants.LI6_MASS_AMU,
        depth_uk: float | None = None,
    ) -> "TrapConfig":
        """Build from ordinary frequencies in Hz and a mass in atomic units."""
        return cls(
            omega_x=constants.TWO_PI * nu_x,
            omega_y=constants.TWO_PI * nu_y,
            omega_z=constants.TWO_PI * nu_z,
            mass=mass_amu * constants.ATOMIC_MASS_KG,
            depth_uk=depth_uk,
        )


# Trap used for the measurements this package models: crossed optical dipole
# trap at full power, frequencies 2pi x (2.4, 5.0, 5.5) kHz.
REFERENCE_TRAP = TrapConfig.from_hz(2400.0, 5000.0, 5500.0)


@dataclass(frozen=True)
class GasState:
    """Atom number (real-valued so ODE evolution stays closed) and
    temperature in uK."""

    n_atoms: float
    temperature: float

    def __post_init__(self):
        if not (self.n_atoms >= 0 and math.isfinite(self.n_atoms)):
            raise ValueError(f"n_atoms must be >= 0, got {self.n_atoms}")
        if not (self.temperature > 0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be > 0, got {self.temperature}")


def mean_geometric_frequency(trap: TrapConfig) -> float:
    """Geometric mean (wx wy wz)^(1/3) in rad/s."""
    return (trap.omega_x * trap.omega_y * trap.omega_z) ** (1.0 / 3.0)


def fermi_temperature(trap: TrapConfig, n_atoms: float) -> float:
    """Fermi temperature hbar (6 N wx wy wz)^(1/3) / k_B in uK.

    Parameters
    ----------
    trap : TrapConfig
    n_atoms : float
        Atom number, must be positive.
    """
    if not n_atoms > 0:
        raise ValueError(f"n_atoms must be positive, got {n_atoms}")
    omega_product = trap.omega_x * trap.omega_y * trap.omega_z
    t_kelvin = constants.HBAR * (6.0 * n_atoms * omega_product) ** (1.0 / 3.0) / constants.K_B
    return t_kelvin / constants.UK_TO_K


def density_prefactor(trap: TrapConfig, temperature: float) -> float:
    """Peak density per atom, n0 / N, in cm^-3.

    This is wbar^3 (m / (2 pi k_B T))^(3/2) with the SI result converted to
    cm^-3; the dynamics module uses it to turn loss coefficients into rate
    polynomial coefficients in N.
    """
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    wbar3 = trap.omega_x * trap.omega_y * trap.omega_z
    thermal = trap.mass / (constants.TWO_PI * constants.uk_to_joule(temperature))
    return wbar3 * thermal**1.5 * constants.M3_DENSITY_TO_CM3


def peak_density(trap: TrapConfig, gas: GasState) -> float:
    """Peak density n0 = N wbar^3 (m / (2 pi k_B T))^(3/2) in cm^-3."""
    return gas.n_atoms * density_prefactor(trap, gas.temperature)


def density_moment(trap: TrapConfig, gas: GasState, a: int) -> float:
    """Density-weighted moment <n^a> = integral n^(a+1) d3r / N in cm^-3a.

    For the Boltzmann profile the moments are analytic:
    <n> = n0 2^(-3/2) and <n^2> = n0^2 3^(-3/2).

    Parameters
    ----------
    a : int
        Moment order, 1 or 2.
    """
    if a == 1:
        return peak_density(trap, gas) * 2.0**-1.5
    if a == 2:
        return peak_density(trap, gas) ** 2 * 3.0**-1.5
    raise ValueError(f"moment order must be 1 or 2, got {a}")
