"""Two-path magneto-association bookkeeping.

The sequence ramps the field from above resonance down to an association
field below it, converting a fraction of the atoms into molecules, then
splits into two detection paths:

  * path 1 ramps further down, binding the molecules so deeply that they
    are invisible to absorption imaging -> counts only unpaired atoms;
  * path 2 ramps back up across the resonance, dissociating the molecules
    -> counts unpaired atoms plus the recovered ones.

The molecule fraction is 1 - N1/N2 and the molecule number (N2 - N1)/2.
Association efficiency is an input parameter, not predicted.  Atomic
two-body losses along each ramp are integrated with a piecewise-constant
field; molecule loss during the ramps is neglected (no molecular lifetime
model), a documented limitation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import backend
from .channels import ChannelParams
from .loss_model import detuning, g2_thermal_exact
from .trap import GasState, TrapConfig, density_prefactor

# Relative shot-to-shot uncertainty assigned to path counts by default.
DEFAULT_NOISE_FRACTION = 0.07

# Lower limit on ramp discretization: at least this many constant-field
# substeps per ramp segment.
MIN_RAMP_STEPS = 20


@dataclass(frozen=True)
class RampProtocol:
    """Field waypoints (G) and ramp durations (s) of the two-path sequence.

    `b_start` -> `b_nuc` is the association ramp (duration `t_assoc`).
    From `b_nuc`, path 1 ramps down to `b_deep` and path 2 up to
    `b_dissoc`, each in `t_path`.
    """

    b_start: float = 190.0
    b_nuc: float = 185.0
    b_dissoc: float = 202.0
    b_deep: float = 176.0
    t_assoc: float = 0.020
    t_path: float = 0.002

    def __post_init__(self):
        for name in ("t_assoc", "t_path"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive, got {value}")
        for name in ("b_start", "b_nuc", "b_dissoc", "b_deep"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def validate_for(self, channel: ChannelParams, use_theory_b_f: bool = False):
        """Enforce b_deep < b_nuc < B_F < b_start <= b_dissoc for the
        channel's resonance position."""
        b_f = channel.b_f(use_theory=use_theory_b_f)
        if not (
            self.b_deep < self.b_nuc < b_f < self.b_start <= self.b_dissoc
        ):
            raise ValueError(
                "protocol fields must satisfy "
                "b_deep < b_nuc < B_F < b_start <= b_dissoc; got "
                f"{self.b_deep} < {self.b_nuc} < {b_f} < {self.b_start} "
                f"<= {self.b_dissoc}"
            )


@dataclass(frozen=True)
class PathCounts:
    """Atom counts of the two detection paths with 1-sigma uncertainties.

    n2 >= n1 is expected physically but not enforced: measurement noise may
    invert the ordering, and the fraction is then reported as-is (negative).
    """

    n1: float
    sigma1: float
    n2: float
    sigma2: float

    def __post_init__(self):
        for name in ("n1", "sigma1", "n2", "sigma2"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be >= 0, got {value}")


class MoleculeFraction(NamedTuple):
    """Molecule fraction with propagated uncertainty and implied molecule
    count."""

    fraction: float
    sigma: float
    molecules: float


def molecule_fraction(counts: PathCounts) -> MoleculeFraction:
    """Molecule fraction 1 - n1/n2 with first-order error propagation.

    The uncertainty is sqrt((sigma1/n2)^2 + (n1 sigma2 / n2^2)^2), the
    first-order propagation of the two counts (algebraically identical to
    (n1/n2) sqrt((sigma1/n1)^2 + (sigma2/n2)^2) but well defined at
    n1 = 0).  The molecule count is (n2 - n1)/2: each dissociated molecule
    returns two atoms to path 2.
    """
    if not counts.n2 > 0:
        raise ValueError(f"n2 must be positive, got {counts.n2}")
    fraction = 1.0 - counts.n1 / counts.n2
    sigma = math.hypot(
        counts.sigma1 / counts.n2,
        counts.n1 * counts.sigma2 / counts.n2**2,
    )
    molecules = 0.5 * (counts.n2 - counts.n1)
    return MoleculeFraction(fraction=fraction, sigma=sigma, molecules=molecules)


def _ramp_losses(
    n_atoms: float,
    b_from: float,
    b_to: float,
    duration: float,
    channel: ChannelParams,
    trap: TrapConfig,
    temperature: float,
    steps: int,
    rtol: float,
    restore_at_b_f: float | None = None,
    restore_amount: float = 0.0,
) -> float:
    """Evolve an atom count along a linear field ramp with two-body losses.

    The ramp is discretized into `steps` constant-field substeps evaluated
    at the midpoint field.  If `restore_at_b_f` is given, `restore_amount`
    atoms are added at the first substep boundary at or beyond that field
    (dissociating molecules re-entering the atomic cloud); if the ramp ends
    before crossing, they are added at the end.
    """
    a2 = density_prefactor(trap, temperature) * 2.0**-1.5
    dt = duration / steps
    t_eval = np.array([0.0, dt])
    edges = np.linspace(b_from, b_to, steps + 1)
    restored = restore_at_b_f is None
    upward = b_to >= b_from
    n = n_atoms
    for i in range(steps):
        if not restored:
            crossed = edges[i] >= restore_at_b_f if upward else edges[i] <= restore_at_b_f
            if crossed:
                n += restore_amount
                restored = True
        b_mid = 0.5 * (edges[i] + edges[i + 1])
        g2 = g2_thermal_exact(temperature, detuning(b_mid, channel), channel)
        out, status, t_fail = backend.decay_integrate(
            n, 0.0, g2 * a2, 0.0, t_eval, rtol
        )
        if status != 0:
            raise RuntimeError(
                f"ramp-loss integration failed at field {b_mid:.3f} G"
            )
        n = float(out[-1])
    if not restored:
        n += restore_amount
    return n


def run_two_path(
    protocol: RampProtocol,
    efficiency: float,
    initial: GasState,
    channel: ChannelParams,
    trap: TrapConfig,
    include_losses: bool = True,
    noise_fraction: float = DEFAULT_NOISE_FRACTION,
    seed: int | None = None,
    steps_per_ramp: int = MIN_RAMP_STEPS,
    rtol: float = 1e-9,
) -> PathCounts:
    """Simulate the two detection paths and return their atom counts.

    A fraction `efficiency` of the atoms surviving the association ramp is
    converted to molecules at `b_nuc`.  Path 1 then counts only the free
    atoms after the down-ramp; path 2 recovers the molecule-bound atoms at
    the resonance crossing of the up-ramp.  With `include_losses` the free
    atoms suffer resonant two-body losses along every ramp; molecules are
    lossless (documented limitation).

    `sigma` fields are `noise_fraction` times the counts.  When `seed` is
    given the counts themselves are jittered by that relative noise,
    mimicking shot-to-shot fluctuations; otherwise the simulation is
    noiseless.
    """
    channel.require_two_body()
    protocol.validate_for(channel)
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError(f"efficiency must be in [0, 1], got {efficiency}")
    if not 0.0 <= noise_fraction < 1.0:
        raise ValueError(
            f"noise_fraction must be in [0, 1), got {noise_fraction}"
        )
    steps = max(int(steps_per_ramp), MIN_RAMP_STEPS)
    temperature = initial.temperature
    b_f = channel.b_f()

    n = initial.n_atoms
    if include_losses:
        n = _ramp_losses(
            n, protocol.b_start, protocol.b_nuc, protocol.t_assoc,
            channel, trap, temperature, steps, rtol,
        )
    bound = efficiency * n
    free = n - bound

    if include_losses:
        n1 = _ramp_losses(
            free, protocol.b_nuc, protocol.b_deep, protocol.t_path,
            channel, trap, temperature, steps, rtol,
        )
        n2 = _ramp_losses(
            free, protocol.b_nuc, protocol.b_dissoc, protocol.t_path,
            channel, trap, temperature, steps, rtol,
            restore_at_b_f=b_f, restore_amount=bound,
        )
    else:
        n1 = free
        n2 = free + bound

    if seed is not None and noise_fraction > 0:
        rng = np.random.default_rng(seed)
        n1 = max(0.0, n1 * (1.0 + noise_fraction * rng.standard_normal()))
        n2 = max(0.0, n2 * (1.0 + noise_fraction * rng.standard_normal()))

    return PathCounts(
        n1=n1,
        sigma1=noise_fraction * n1,
        n2=n2,
        sigma2=noise_fraction * n2,
    )
