"""Trap-loss dynamics: rate equation, decay curves, and field scans.

The atom number obeys

    dN/dt = -N (Gamma_1 + G2 <n> + L3 <n^2>)

with Boltzmann density moments <n> = n0 2^(-3/2), <n^2> = n0^2 3^(-3/2) and
peak density n0 = N * density_prefactor(trap, T).  Substituting the moments
turns the right-hand side into a cubic polynomial in N,

    dN/dt = -N (c1 + c2 N + c3 N^2),

which is what the integration kernel consumes.  Temperature is held fixed
over a simulated curve (no anti-evaporation model).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from . import backend
from .channels import ChannelParams
from .loss_model import detuning, g2_thermal_exact, resonance_width_estimate
from .trap import GasState, TrapConfig, density_prefactor

# Default one-body rate: 1 / (30 s vacuum-limited trap lifetime).
DEFAULT_ONE_BODY_RATE = 1.0 / 30.0

_MOMENT_1 = 2.0**-1.5
_MOMENT_2 = 3.0**-1.5


class IntegrationError(RuntimeError):
    """Raised when the ODE integrator cannot reach a requested sample time."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (first unreached sample time {t_fail:g} s)")
        self.t_fail = t_fail


@dataclass(frozen=True)
class LossRates:
    """Loss coefficients: `g2` in cm^3/s, `l3` in cm^6/s, `one_body_rate`
    in 1/s.  All must be >= 0; zero disables the corresponding process."""

    g2: float = 0.0
    l3: float = 0.0
    one_body_rate: float = 0.0

    def __post_init__(self):
        for name in ("g2", "l3", "one_body_rate"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be >= 0 and finite, got {value}")


@dataclass(frozen=True)
class DecayCurve:
    """Sampled atom-number decay: times in s (strictly increasing), atom
    numbers >= 0, optional per-sample uncertainties, and free-form metadata
    describing how the curve was produced."""

    times: np.ndarray
    atoms: np.ndarray
    sigma: np.ndarray | None = None
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        atoms = np.asarray(self.atoms, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "atoms", atoms)
        if times.ndim != 1 or atoms.shape != times.shape:
            raise ValueError("times and atoms must be 1-D arrays of equal length")
        if times.size and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(atoms)):
            raise ValueError("times and atoms must be finite")
        if np.any(atoms < 0):
            raise ValueError("atom numbers must be >= 0")
        if self.sigma is not None:
            sigma = np.asarray(self.sigma, dtype=float)
            object.__setattr__(self, "sigma", sigma)
            if sigma.shape != times.shape:
                raise ValueError("sigma must match times in shape")
            if not np.all(np.isfinite(sigma)) or np.any(sigma < 0):
                raise ValueError("sigma values must be finite and >= 0")

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class ScanCurve:
    """Remaining atom number after a fixed hold, versus magnetic field.
    Fields in G (strictly increasing), atom numbers >= 0."""

    b_fields: np.ndarray
    atoms: np.ndarray
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        b_fields = np.asarray(self.b_fields, dtype=float)
        atoms = np.asarray(self.atoms, dtype=float)
        object.__setattr__(self, "b_fields", b_fields)
        object.__setattr__(self, "atoms", atoms)
        if b_fields.ndim != 1 or atoms.shape != b_fields.shape:
            raise ValueError("b_fields and atoms must be 1-D arrays of equal length")
        if b_fields.size and not np.all(np.diff(b_fields) > 0):
            raise ValueError("b_fields must be strictly increasing")
        if np.any(atoms < 0):
            raise ValueError("atom numbers must be >= 0")

    def __len__(self) -> int:
        return self.b_fields.size


def rate_polynomial(
    rates: LossRates, trap: TrapConfig, temperature: float
) -> tuple[float, float, float]:
    """Coefficients (c1, c2, c3) of dN/dt = -N (c1 + c2 N + c3 N^2).

    c1 is the one-body rate; c2 and c3 fold the density moments of the
    Boltzmann profile into the two- and three-body coefficients.
    """
    prefactor = density_prefactor(trap, temperature)
    c1 = rates.one_body_rate
    c2 = rates.g2 * prefactor * _MOMENT_1
    c3 = rates.l3 * prefactor**2 * _MOMENT_2
    return c1, c2, c3


def decay_rhs(
    n_atoms: float, rates: LossRates, trap: TrapConfig, temperature: float
) -> float:
    """Instantaneous dN/dt in atoms/s for the given loss coefficients."""
    if n_atoms < 0:
        raise ValueError(f"n_atoms must be >= 0, got {n_atoms}")
    c1, c2, c3 = rate_polynomial(rates, trap, temperature)
    return -n_atoms * (c1 + n_atoms * (c2 + n_atoms * c3))


def simulate_decay(
    initial: GasState,
    rates: LossRates,
    trap: TrapConfig,
    times: "np.ndarray | list[float]",
    rtol: float = 1e-9,
) -> DecayCurve:
    """Integrate the decay from `initial` and sample it at `times`.

    Parameters
    ----------
    times : array-like
        Sample times in s; must start at 0 and be strictly increasing.
    rtol : float
        Relative tolerance of the adaptive integrator.

    Raises
    ------
    IntegrationError
        If the integrator cannot reach a sample time; the exception carries
        that time.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("times must be a 1-D array with at least two samples")
    if t[0] != 0.0:
        raise ValueError(f"times must start at 0, got {t[0]}")
    if not np.all(np.diff(t) > 0):
        raise ValueError("times must be strictly increasing")
    c1, c2, c3 = rate_polynomial(rates, trap, initial.temperature)
    atoms, status, t_fail = backend.decay_integrate(
        initial.n_atoms, c1, c2, c3, t, rtol
    )
    if status != 0:
        reason = "step count limit" if status == 1 else "step size underflow"
        raise IntegrationError(f"decay integration failed: {reason}", t_fail)
    meta = {
        "kind": "decay",
        "n0": initial.n_atoms,
        "temperature_uk": initial.temperature,
        "g2_cm3s": rates.g2,
        "l3_cm6s": rates.l3,
        "one_body_rate_s": rates.one_body_rate,
    }
    return DecayCurve(times=t, atoms=atoms, meta=meta)


def simulate_field_scan(
    initial: GasState,
    channel: ChannelParams,
    trap: TrapConfig,
    b_fields: "np.ndarray | list[float]",
    t_wait: float,
    background: LossRates = LossRates(),
    use_theory_b_f: bool = False,
    rtol: float = 1e-9,
) -> ScanCurve:
    """Remaining atom number after holding `t_wait` s at each field.

    At every field the resonant two-body coefficient is the exact thermal
    average at that detuning, added on top of `background` (which can carry
    one-body, three-body, and off-resonant two-body losses).  Each field is
    an independent experiment starting from `initial`.
    """
    channel.require_two_body()
    if not t_wait > 0:
        raise ValueError(f"t_wait must be positive, got {t_wait}")
    b = np.asarray(b_fields, dtype=float)
    if b.ndim != 1 or b.size < 1:
        raise ValueError("b_fields must be a non-empty 1-D array")
    if b.size > 1 and not np.all(np.diff(b) > 0):
        raise ValueError("b_fields must be strictly increasing")
    t_eval = np.array([0.0, t_wait])
    remaining = np.empty_like(b)
    for i, b_field in enumerate(b):
        delta = detuning(b_field, channel, use_theory_b_f=use_theory_b_f)
        g2_res = g2_thermal_exact(initial.temperature, delta, channel)
        rates = LossRates(
            g2=background.g2 + g2_res,
            l3=background.l3,
            one_body_rate=background.one_body_rate,
        )
        curve = simulate_decay(initial, rates, trap, t_eval, rtol=rtol)
        remaining[i] = curve.atoms[-1]
    meta = {
        "kind": "field_scan",
        "channel": channel.channel.label,
        "b_f_g": channel.b_f(use_theory=use_theory_b_f),
        "t_wait_s": t_wait,
        "n0": initial.n_atoms,
        "temperature_uk": initial.temperature,
        "width_estimate_g": resonance_width_estimate(initial.temperature, channel),
    }
    return ScanCurve(b_fields=b, atoms=remaining, meta=meta)


def synthesize_noisy_curve(
    curve: DecayCurve, relative_noise: float, seed: int
) -> DecayCurve:
    """Apply multiplicative Gaussian noise to a decay curve.

    Each sample becomes atoms * (1 + relative_noise * z) with z standard
    normal, clamped at zero; `sigma` is set to relative_noise times the
    noisy value, mimicking a detection-limited counting uncertainty.
    Deterministic for a fixed seed.
    """
    if not (0 <= relative_noise < 1):
        raise ValueError(
            f"relative_noise must be in [0, 1), got {relative_noise}"
        )
    rng = np.random.default_rng(seed)
    factors = 1.0 + relative_noise * rng.standard_normal(curve.atoms.shape)
    noisy = np.clip(curve.atoms * factors, 0.0, None)
    sigma = relative_noise * noisy
    meta = dict(curve.meta)
    meta.update({"relative_noise": relative_noise, "seed": seed})
    return DecayCurve(times=curve.times, atoms=noisy, sigma=sigma, meta=meta)


@dataclass(frozen=True)
class DipMetrics:
    """Shape summary of a loss dip in a field scan.

    `b_min` is the field of deepest loss, `baseline` the off-resonant atom
    number, `depth` the fractional loss at the minimum.  `fwhm` is the full
    width at half depth; `hwhm_high` is the half width on the high-field
    side only, where the dip is governed by the thermal tail.  Widths are
    NaN when the corresponding half-depth crossing lies outside the scan.
    """

    b_min: float
    n_min: float
    baseline: float
    depth: float
    fwhm: float
    hwhm_low: float
    hwhm_high: float


def _cross(b: np.ndarray, n: np.ndarray, level: float, i_min: int, step: int) -> float:
    """Field where the scan first rises through `level` walking from the
    minimum in direction `step`; NaN if it never does."""
    i = i_min
    while 0 <= i + step < n.size:
        j = i + step
        if n[j] >= level:
            # Linear interpolation between the bracketing samples.
            frac = (level - n[i]) / (n[j] - n[i])
            return b[i] + frac * (b[j] - b[i])
        i = j
    return math.nan


def dip_metrics(scan: ScanCurve) -> DipMetrics:
    """Locate the loss dip of a field scan and measure its width.

    The baseline is the larger endpoint of the scan (the low-field side is
    loss-free, so on a scan spanning the resonance this is the unlossed
    atom number).  Widths are measured at half depth.
    """
    if len(scan) < 3:
        raise ValueError("scan must have at least 3 points")
    n = scan.atoms
    b = scan.b_fields
    i_min = int(np.argmin(n))
    baseline = float(max(n[0], n[-1]))
    n_min = float(n[i_min])
    if baseline <= 0:
        raise ValueError("scan baseline is zero; no dip to measure")
    level = n_min + 0.5 * (baseline - n_min)
    b_lo = _cross(b, n, level, i_min, -1)
    b_hi = _cross(b, n, level, i_min, +1)
    b_min = float(b[i_min])
    return DipMetrics(
        b_min=b_min,
        n_min=n_min,
        baseline=baseline,
        depth=1.0 - n_min / baseline,
        fwhm=b_hi - b_lo,
        hwhm_low=b_min - b_lo,
        hwhm_high=b_hi - b_min,
    )
