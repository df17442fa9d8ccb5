"""Resonant two-body loss model and the three-body threshold law.

Two open channels coupled to a single quasi-bound p-wave molecular state give
a Lorentzian energy-dependent inelastic rate

    g2(E) = K E / ((E - delta)^2 + gamma^2 / 4),

with detuning delta = mu (B - B_F) measured from the resonance field.  What an
experiment sees is the thermal average G2(T, delta).  Two routes are provided:

* ``g2_thermal_exact`` integrates g2 against the Maxwell-Boltzmann
  distribution of relative collision energy,
  P(E; T) = (2/sqrt(pi)) T^(-3/2) sqrt(E) exp(-E/T),
  by adaptive quadrature (the integrand has a spike of width gamma << T).
* ``g2_thermal_asymptotic`` is the closed form valid for delta > 0 and
  delta >> gamma, where the spike acts as a delta function of weight
  2 pi K delta / gamma:
  G2 = 4 sqrt(pi) (K/gamma) (delta/T)^(3/2) exp(-delta/T).

The distribution choice is pinned by consistency: the narrow-resonance limit
of the Maxwell-Boltzmann average reproduces the 4 sqrt(pi) prefactor of the
closed form exactly.

Energies are in uK (k_B divided out), fields in G, rates in cm^3/s.
Three-body loss is modelled only through the Wigner-regime power law
L3(T) = C T^lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from . import backend
from .channels import ChannelParams

FOUR_SQRT_PI = 4.0 * math.sqrt(math.pi)

# Below this ratio the closed form is a poor stand-in for the average.
ASYMPTOTIC_MIN_DELTA_OVER_GAMMA = 10.0


class QuadratureError(RuntimeError):
    """Thermal average failed to reach the requested tolerance."""

    def __init__(self, value: float, error_estimate: float, rtol: float):
        self.value = value
        self.error_estimate = error_estimate
        self.rtol = rtol
        super().__init__(
            f"quadrature did not converge: value={value:.6e}, achieved error "
            f"estimate {error_estimate:.2e} exceeds rtol={rtol:.1e}"
        )


@dataclass(frozen=True)
class Detuning:
    """Signed detuning in uK; positive above resonance (B > B_F)."""

    delta: float

    def __post_init__(self):
        if not math.isfinite(self.delta):
            raise ValueError(f"detuning must be finite, got {self.delta}")


def _delta_value(delta: "Detuning | float") -> float:
    return delta.delta if isinstance(delta, Detuning) else float(delta)


def detuning(
    b_field: float, channel: ChannelParams, use_theory_b_f: bool = False
) -> Detuning:
    """delta = mu (B - B_F) in uK for a field `b_field` in G.

    Uses the measured resonance position unless `use_theory_b_f`.  Channels
    without two-body constants are rejected.
    """
    channel.require_two_body()
    return Detuning(channel.mu * (b_field - channel.b_f(use_theory=use_theory_b_f)))


def g2_energy(e_coll: float, delta: "Detuning | float", channel: ChannelParams) -> float:
    """Two-body loss rate at collision energy `e_coll` (uK), in cm^3/s."""
    channel.require_two_body()
    if e_coll < 0:
        raise ValueError(f"collision energy must be >= 0, got {e_coll}")
    return backend.g2_energy(e_coll, _delta_value(delta), channel.k, channel.gamma)


def g2_thermal_exact(
    temperature: float,
    delta: "Detuning | float",
    channel: ChannelParams,
    rtol: float = 1e-8,
    max_intervals: int = 256,
) -> float:
    """Thermally averaged two-body loss rate by adaptive quadrature, cm^3/s.

    Parameters
    ----------
    temperature : float
        Gas temperature in uK, > 0.
    delta : Detuning or float
        Detuning in uK.
    rtol : float
        Relative tolerance per quadrature piece.

    Raises
    ------
    QuadratureError
        If the error estimate does not meet `rtol`; the exception carries the
        value and the achieved estimate.
    """
    channel.require_two_body()
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    value, err, converged = backend.thermal_g2(
        temperature, _delta_value(delta), channel.k, channel.gamma, rtol, max_intervals
    )
    if not converged:
        raise QuadratureError(value, err, rtol)
    return value


class AsymptoticRate(NamedTuple):
    """Closed-form thermal rate with a validity flag (kept a flag, not an
    error, so field scans across resonance stay total)."""

    value: float
    in_regime: bool


def g2_thermal_asymptotic(
    temperature: float, delta: "Detuning | float", channel: ChannelParams
) -> AsymptoticRate:
    """Closed-form thermal average, cm^3/s.

    Evaluates 4 sqrt(pi) (K/gamma) (delta/T)^(3/2) exp(-delta/T) for
    delta > 0 and returns 0 below resonance.  `in_regime` is False outside
    the regime where the form is derived (delta <= 0 or delta < 10 gamma).
    """
    channel.require_two_body()
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    d = _delta_value(delta)
    if d <= 0:
        return AsymptoticRate(0.0, False)
    x = d / temperature
    value = FOUR_SQRT_PI * (channel.k / channel.gamma) * x**1.5 * math.exp(-x)
    in_regime = d >= ASYMPTOTIC_MIN_DELTA_OVER_GAMMA * channel.gamma
    return AsymptoticRate(value, in_regime)


def peak_detuning(temperature: float) -> float:
    """Detuning maximizing the closed-form thermal rate: 3 T / 2, in uK."""
    return 1.5 * temperature


@dataclass(frozen=True)
class ThresholdLaw:
    """Three-body power law L3(T) = coefficient * T^exponent.

    coefficient in cm^6 s^-1 uK^-exponent; exponent >= 0 (identical fermions
    in the Wigner regime have exponent >= 2).
    """

    coefficient: float
    exponent: float = 2.0

    def __post_init__(self):
        if self.coefficient < 0:
            raise ValueError(f"coefficient must be >= 0, got {self.coefficient}")
        if self.exponent < 0:
            raise ValueError(f"exponent must be >= 0, got {self.exponent}")


def l3_threshold(temperature: float, law: ThresholdLaw) -> float:
    """Three-body loss coefficient C T^lambda in cm^6/s."""
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return law.coefficient * temperature**law.exponent


def resonance_width_estimate(temperature: float, channel: ChannelParams) -> float:
    """Field width k_B T / mu over which losses respond, in G."""
    channel.require_two_body()
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    return temperature / channel.mu
