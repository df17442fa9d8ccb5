"""Parameter inference: loss-coefficient fits, detuning fits, and the
threshold-law ratio test.

All fits are damped least squares (Levenberg-Marquardt) with
inverse-variance weighting when per-sample uncertainties are available and
uniform weighting otherwise.  Rate coefficients are kept non-negative by
fitting their logarithms; the detuning parameter is unconstrained in sign.
Every fit is deterministic given its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import least_squares

from . import backend
from .channels import ChannelParams
from .dynamics import DecayCurve
from .loss_model import g2_thermal_asymptotic, g2_thermal_exact
from .trap import TrapConfig, density_prefactor

# Convergence thresholds: relative parameter step, relative residual decrease,
# and the evaluation cap shared by all fits.
XTOL = 1e-8
FTOL = 1e-10
MAX_NFEV = 500

_MODELS = {
    "two_body": ("g2",),
    "three_body": ("l3",),
    "both": ("g2", "l3"),
}

# Multiplicative offsets applied to the rate starting points to dodge local
# minima in multi-term fits; the best residual wins.
_START_FACTORS = (1.0, 10.0, 0.1)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a least-squares fit.

    `parameters` maps name -> value (units per fit, documented on the fit
    functions); `covariance` is ordered like `names`; `residual_norm` is
    chi-square per degree of freedom; `iterations` counts model
    evaluations.
    """

    parameters: dict[str, float]
    covariance: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.parameters)

    def sigma(self, name: str) -> float:
        """1-sigma uncertainty of one parameter from the covariance."""
        i = self.names.index(name)
        return math.sqrt(max(self.covariance[i, i], 0.0))


@dataclass(frozen=True)
class RatePoint:
    """One measured two-body rate: temperature in uK, g2 and its 1-sigma
    uncertainty in cm^3/s.  All strictly positive."""

    temperature: float
    g2: float
    sigma_g2: float

    def __post_init__(self):
        for name in ("temperature", "g2", "sigma_g2"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive, got {value}")


def _covariance_from_jacobian(
    jac: np.ndarray, scale: float = 1.0
) -> np.ndarray:
    """Parameter covariance (J^T J)^-1 * scale, falling back to a
    pseudo-inverse when the normal matrix is singular."""
    jtj = jac.T @ jac
    try:
        cov = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(jtj)
    return cov * scale


def fit_decay(
    curve: DecayCurve,
    trap: TrapConfig,
    temperature: float,
    model: str = "both",
    one_body_rate: float = 0.0,
    max_nfev: int = MAX_NFEV,
) -> FitResult:
    """Fit loss coefficients to a decay curve.

    The model is the integrated rate equation with the requested loss terms;
    the initial atom number is fitted alongside them as a nuisance parameter
    so that a noisy first sample does not bias the rates.  `one_body_rate`
    (1/s) is applied as a known background, not fitted.

    Parameters
    ----------
    curve : DecayCurve
        At least 5 samples; `sigma` used as weights when present, else
        uniform weights.
    temperature : float
        Gas temperature in uK (fixed over the curve).
    model : str
        One of "two_body" (fit g2), "three_body" (fit l3), "both".

    Returns
    -------
    FitResult
        Parameters "n0" (atoms) plus "g2" (cm^3/s) and/or "l3" (cm^6/s).

    Raises
    ------
    ValueError
        For an unknown model, fewer than 5 samples, non-positive provided
        sigma, or a degenerate (constant) curve.
    """
    if model not in _MODELS:
        raise ValueError(
            f"unknown model {model!r}; expected one of {sorted(_MODELS)}"
        )
    rate_names = _MODELS[model]
    if not one_body_rate >= 0:
        raise ValueError(f"one_body_rate must be >= 0, got {one_body_rate}")
    t = curve.times
    n = curve.atoms
    if t.size < 5:
        raise ValueError(f"need at least 5 samples to fit, got {t.size}")
    if t[0] < 0:
        raise ValueError("sample times must be >= 0")
    if np.ptp(n) <= 1e-9 * max(float(np.max(np.abs(n))), 1.0):
        raise ValueError("degenerate curve: atom number is constant")
    if curve.sigma is not None:
        sigma = curve.sigma
        if np.any(sigma <= 0):
            raise ValueError("provided sigma values must all be positive")
        sigma_provided = True
    else:
        sigma = np.ones_like(n)
        sigma_provided = False

    prefactor = density_prefactor(trap, temperature)
    a2 = prefactor * 2.0**-1.5
    a3 = prefactor**2 * 3.0**-1.5

    n0_init = float(np.max(n))
    if not n0_init > 0:
        raise ValueError("curve has no positive samples")
    t_end = float(t[-1]) if t[-1] > 0 else 1.0
    n_end = max(float(n[-1]), 1e-6 * n0_init)

    # Crude closed-form seeds: attribute the whole observed decay to each
    # term in turn; fall back to a mild rate when the estimate is negative.
    g2_init = (1.0 / n_end - 1.0 / n0_init) / (t_end * a2)
    if not g2_init > 0:
        g2_init = 0.1 / (a2 * n0_init * t_end)
    l3_init = (1.0 / n_end**2 - 1.0 / n0_init**2) / (2.0 * t_end * a3)
    if not l3_init > 0:
        l3_init = 0.1 / (a3 * n0_init**2 * t_end)
    rate_inits = {"g2": g2_init, "l3": l3_init}

    def residuals(theta: np.ndarray) -> np.ndarray:
        values = np.exp(np.minimum(theta, 700.0))
        n0 = values[0]
        rates = dict(zip(rate_names, values[1:]))
        c2 = rates.get("g2", 0.0) * a2
        c3 = rates.get("l3", 0.0) * a3
        model_n, _status, _t_fail = backend.decay_integrate(
            n0, one_body_rate, c2, c3, t, 1e-9
        )
        return (model_n - n) / sigma

    best = None
    for factor in _START_FACTORS:
        x0 = np.log(
            [n0_init] + [rate_inits[name] * factor for name in rate_names]
        )
        result = least_squares(
            residuals,
            x0,
            method="lm",
            xtol=XTOL,
            ftol=FTOL,
            gtol=1e-14,
            max_nfev=max_nfev,
        )
        if best is None or _better_fit(result, best, a2, a3, rate_names):
            best = result

    values = np.exp(best.x)
    parameters = {"n0": float(values[0])}
    parameters.update(
        {name: float(value) for name, value in zip(rate_names, values[1:])}
    )
    dof = max(t.size - best.x.size, 1)
    chi2 = float(2.0 * best.cost)
    scale = 1.0 if sigma_provided else chi2 / dof
    cov_log = _covariance_from_jacobian(best.jac, scale)
    jacobian_to_linear = np.diag(values)
    covariance = jacobian_to_linear @ cov_log @ jacobian_to_linear
    return FitResult(
        parameters=parameters,
        covariance=covariance,
        residual_norm=chi2 / dof,
        converged=bool(best.status > 0),
        iterations=int(best.nfev),
    )


def _effective_rate_count(
    result, a2: float, a3: float, rate_names: Sequence[str]
) -> int:
    """Number of fitted rate terms contributing non-negligibly to the
    initial loss rate (used only to break cost ties)."""
    values = np.exp(result.x)
    n0 = values[0]
    contributions = []
    for name, value in zip(rate_names, values[1:]):
        if name == "g2":
            contributions.append(value * a2 * n0)
        else:
            contributions.append(value * a3 * n0**2)
    total = sum(contributions)
    if total <= 0:
        return 0
    return sum(1 for c in contributions if c > 1e-12 * total)


def _better_fit(candidate, incumbent, a2, a3, rate_names) -> bool:
    """Lower cost wins; near-ties go to the fit using fewer rate terms."""
    scale = max(candidate.cost, incumbent.cost, 1e-300)
    if abs(candidate.cost - incumbent.cost) > 1e-10 * scale:
        return candidate.cost < incumbent.cost
    return _effective_rate_count(
        candidate, a2, a3, rate_names
    ) < _effective_rate_count(incumbent, a2, a3, rate_names)


def fit_detuning(
    points: Iterable[RatePoint],
    channel: ChannelParams,
    use_exact: bool = False,
    max_nfev: int = MAX_NFEV,
) -> FitResult:
    """Fit the field offset from measured g2(T) values.

    The single fitted parameter "db" (G) is the distance of the hold field
    from resonance; the model is the closed-form thermal average at
    detuning mu * db (or the exact quadrature average with
    `use_exact=True`).  Points should span at least a factor 2 in
    temperature for the parameter to be well constrained.

    Raises
    ------
    ValueError
        If fewer than 3 points are given or all temperatures coincide.
    """
    channel.require_two_body()
    points = list(points)
    if len(points) < 3:
        raise ValueError(f"need at least 3 rate points, got {len(points)}")
    temps = np.array([p.temperature for p in points])
    rates = np.array([p.g2 for p in points])
    sigmas = np.array([p.sigma_g2 for p in points])
    if np.ptp(temps) == 0:
        raise ValueError(
            "all temperatures identical: the field offset is unidentifiable"
        )

    mu = channel.mu

    def model(db: float) -> np.ndarray:
        delta = mu * db
        if use_exact:
            return np.array(
                [g2_thermal_exact(t, delta, channel) for t in temps]
            )
        return np.array(
            [g2_thermal_asymptotic(t, delta, channel).value for t in temps]
        )

    def residuals(theta: np.ndarray) -> np.ndarray:
        return (model(theta[0]) - rates) / sigmas

    db_init = float(np.median(temps)) / (2.0 * mu)
    best = None
    for factor in (1.0, 4.0, 0.25):
        result = least_squares(
            residuals,
            np.array([db_init * factor]),
            method="lm",
            xtol=XTOL,
            ftol=FTOL,
            gtol=1e-14,
            max_nfev=max_nfev,
        )
        if best is None or result.cost < best.cost:
            best = result

    dof = max(len(points) - 1, 1)
    chi2 = float(2.0 * best.cost)
    covariance = _covariance_from_jacobian(best.jac)
    return FitResult(
        parameters={"db": float(best.x[0])},
        covariance=covariance,
        residual_norm=chi2 / dof,
        converged=bool(best.status > 0),
        iterations=int(best.nfev),
    )


CONSISTENT = "consistent_with_threshold_law"
VIOLATES = "violates_threshold_law"


@dataclass(frozen=True)
class ThresholdVerdict:
    """Outcome of the three-body threshold-law ratio test."""

    ratio: float
    bound: float
    classification: str

    @property
    def consistent(self) -> bool:
        return self.classification == CONSISTENT


def threshold_ratio(
    l3_low: float,
    l3_high: float,
    t_low: float,
    t_high: float,
    lambda_bound: float = 2.0,
) -> ThresholdVerdict:
    """Test measured three-body rates against the threshold law.

    A threshold-law coefficient growing at least as T^lambda_bound forces
    L3(t_low)/L3(t_high) <= (t_low/t_high)^lambda_bound when t_low < t_high.
    The boundary case counts as consistent.
    """
    for name, value in (
        ("l3_low", l3_low),
        ("l3_high", l3_high),
        ("t_low", t_low),
        ("t_high", t_high),
        ("lambda_bound", lambda_bound),
    ):
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive, got {value}")
    if not t_low < t_high:
        raise ValueError(
            f"t_low must be below t_high, got {t_low} >= {t_high}"
        )
    ratio = l3_low / l3_high
    bound = (t_low / t_high) ** lambda_bound
    consistent = ratio <= bound * (1.0 + 1e-12)
    return ThresholdVerdict(
        ratio=ratio,
        bound=bound,
        classification=CONSISTENT if consistent else VIOLATES,
    )
