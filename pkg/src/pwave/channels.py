"""Spin-channel catalog for the three p-wave resonances of 6Li (f=1/2).

Each channel pairs two hyperfine Zeeman sublevels (m_f, m_f') of the lowest
hyperfine manifold.  The catalog stores the resonance position (coupled-channels
prediction and measured value) and, for the two channels dominated by dipolar
relaxation, the constants (K, gamma, mu) of the resonant two-body loss model.
The fully polarized ground-state channel (1/2,1/2) decays by three-body
recombination and carries no two-body constants; asking for a two-body model
on it is an error rather than a silent zero.

Also provides the molecular-state enumerator implementing the even-parity
selection rule S + I + l = even for two colliding 6Li atoms
(s1 = s2 = 1/2, i1 = i2 = 1).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

_HALF_VALUES = (0.5, -0.5)
_HALF_LABELS = {0.5: "1/2", -0.5: "-1/2"}


def _parse_half(token: str) -> float:
    token = token.strip().lstrip("+")
    if token in ("1/2", "0.5"):
        return 0.5
    if token in ("-1/2", "-0.5"):
        return -0.5
    raise ValueError(f"not a valid m_f value: {token!r} (expected 1/2 or -1/2)")


@dataclass(frozen=True)
class SpinChannel:
    """Unordered pair of m_f values, stored canonically with m_f1 >= m_f2."""

    m_f1: float
    m_f2: float

    def __post_init__(self):
        if self.m_f1 not in _HALF_VALUES or self.m_f2 not in _HALF_VALUES:
            raise ValueError(
                f"m_f values must be +/-1/2, got ({self.m_f1}, {self.m_f2})"
            )
        if self.m_f1 < self.m_f2:
            m1, m2 = self.m_f2, self.m_f1
            object.__setattr__(self, "m_f1", m1)
            object.__setattr__(self, "m_f2", m2)

    @classmethod
    def from_label(cls, label: str) -> "SpinChannel":
        """Parse labels like ``1/2,-1/2`` or ``(1/2, 1/2)``."""
        body = label.strip().strip("()")
        parts = body.split(",")
        if len(parts) != 2:
            raise ValueError(f"not a valid channel label: {label!r}")
        return cls(_parse_half(parts[0]), _parse_half(parts[1]))

    @property
    def label(self) -> str:
        return f"{_HALF_LABELS[self.m_f1]},{_HALF_LABELS[self.m_f2]}"

    def __str__(self) -> str:
        return f"({self.label})"


@dataclass(frozen=True)
class MolecularState:
    """Molecular-basis quantum numbers: total electron spin S, total nuclear
    spin I and orbital angular momentum l, constrained to even S + I + l."""

    S: int
    I: int
    l: int

    def __post_init__(self):
        if self.S not in (0, 1):
            raise ValueError(f"S must be 0 or 1, got {self.S}")
        if self.I not in (0, 1, 2):
            raise ValueError(f"I must be 0, 1 or 2, got {self.I}")
        if self.l < 0:
            raise ValueError(f"l must be non-negative, got {self.l}")
        if (self.S + self.I + self.l) % 2 != 0:
            raise ValueError(
                f"S + I + l must be even, got S={self.S}, I={self.I}, l={self.l}"
            )


def allowed_molecular_states(l: int, s_filter: int | None = None) -> list[MolecularState]:
    """Enumerate the (S, I) combinations allowed with orbital momentum `l`.

    For two 6Li atoms S runs over {0, 1} and I over {0, 1, 2}; the
    symmetrization requirement keeps only combinations with S + I + l even.
    Results are sorted by (S, I).  `s_filter` restricts to one value of S.
    """
    if l < 0:
        raise ValueError(f"l must be non-negative, got {l}")
    if s_filter is not None and s_filter not in (0, 1):
        raise ValueError(f"S filter must be 0 or 1, got {s_filter}")
    states = [
        MolecularState(S=s, I=i, l=l)
        for s in (0, 1)
        for i in (0, 1, 2)
        if (s + i + l) % 2 == 0 and (s_filter is None or s == s_filter)
    ]
    return states


@dataclass(frozen=True)
class ChannelParams:
    """Resonance data for one spin channel.

    Fields
    ------
    b_f_theory, b_f_exp, b_f_exp_err : float
        Resonance position in G: coupled-channels prediction, measured value
        and its 1-sigma calibration uncertainty.
    k : float or None
        Two-body loss strength, cm^3 uK / s.
    gamma : float or None
        Energy width of the quasi-bound molecular state, uK.
    mu : float or None
        Differential magnetic moment of the molecular state, uK/G.
    molecule_signal : bool or None
        Whether two-path magneto-association detected molecules in this
        channel (None if not attempted).
    """

    channel: SpinChannel
    b_f_theory: float
    b_f_exp: float
    b_f_exp_err: float
    k: float | None = None
    gamma: float | None = None
    mu: float | None = None
    molecule_signal: bool | None = None

    def __post_init__(self):
        two_body = (self.k, self.gamma, self.mu)
        if any(v is not None for v in two_body) and not all(
            v is not None for v in two_body
        ):
            raise ValueError("k, gamma and mu must be given together or not at all")
        for name, value in (("k", self.k), ("gamma", self.gamma), ("mu", self.mu)):
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")

    @property
    def has_two_body(self) -> bool:
        return self.k is not None

    def b_f(self, use_theory: bool = False) -> float:
        """Resonance position in G; the measured value unless `use_theory`."""
        return self.b_f_theory if use_theory else self.b_f_exp

    def require_two_body(self) -> "ChannelParams":
        if not self.has_two_body:
            raise ValueError(
                f"channel {self.channel} has no two-body loss constants "
                "(losses are three-body dominated)"
            )
        return self


# Built-in catalog.  Positions in G; K in cm^3 uK/s, gamma in uK, mu in uK/G.
CATALOG: tuple[ChannelParams, ...] = (
    ChannelParams(
        channel=SpinChannel(0.5, 0.5),
        b_f_theory=159.0,
        b_f_exp=160.2,
        b_f_exp_err=0.6,
        molecule_signal=False,
    ),
    ChannelParams(
        channel=SpinChannel(0.5, -0.5),
        b_f_theory=185.0,
        b_f_exp=186.2,
        b_f_exp_err=0.6,
        k=1.21e-13,
        gamma=0.05,
        mu=117.0,
        molecule_signal=True,
    ),
    ChannelParams(
        channel=SpinChannel(-0.5, -0.5),
        b_f_theory=215.0,
        b_f_exp=215.2,
        b_f_exp_err=0.6,
        k=7.33e-13,
        gamma=0.08,
        mu=111.0,
    ),
)

_BY_CHANNEL = {entry.channel: entry for entry in CATALOG}

for _entry in CATALOG:
    # Catalog sanity: predicted and measured resonance positions must be close.
    if abs(_entry.b_f_theory - _entry.b_f_exp) > 2.0:
        raise AssertionError(
            "catalog entry has theory/experiment resonance positions differing "
            f"by more than 2 G: {_entry}"
        )
del _entry

CSV_HEADER = "channel,bf_theory_g,bf_exp_g,bf_exp_err_g,k_cm3uKs,gamma_uk,mu_uk_per_g"


def channel_params(channel: SpinChannel | str) -> ChannelParams:
    """Look up the catalog entry for `channel` (a SpinChannel or its label)."""
    if isinstance(channel, str):
        channel = SpinChannel.from_label(channel)
    try:
        return _BY_CHANNEL[channel]
    except KeyError:
        raise ValueError(f"unknown channel {channel}") from None


def catalog_csv() -> str:
    """Catalog as CSV text (header + one row per channel)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for entry in CATALOG:
        writer.writerow(
            [
                f"({entry.channel.label})",
                repr(entry.b_f_theory),
                repr(entry.b_f_exp),
                repr(entry.b_f_exp_err),
                "" if entry.k is None else repr(entry.k),
                "" if entry.gamma is None else repr(entry.gamma),
                "" if entry.mu is None else repr(entry.mu),
            ]
        )
    return buf.getvalue()


def catalog_table() -> str:
    """Catalog as an aligned plain-text table."""
    rows = [
        (
            "channel",
            "Bf_theory[G]",
            "Bf_exp[G]",
            "err[G]",
            "K[cm^3 uK/s]",
            "gamma[uK]",
            "mu[uK/G]",
        )
    ]
    for entry in CATALOG:
        rows.append(
            (
                f"({entry.channel.label})",
                f"{entry.b_f_theory:g}",
                f"{entry.b_f_exp:g}",
                f"{entry.b_f_exp_err:g}",
                "-" if entry.k is None else f"{entry.k:.3g}",
                "-" if entry.gamma is None else f"{entry.gamma:g}",
                "-" if entry.mu is None else f"{entry.mu:g}",
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ]
    return "\n".join(lines)
