"""Run configuration: flat `key = value` sections in INI style.

Example::

    [trap]
    omega_x_hz = 2400
    omega_y_hz = 5000
    omega_z_hz = 5500

    [gas]
    n_atoms = 1e5
    temperature_uk = 10

    [channel]
    pair = 1/2,-1/2

    [overrides]
    gamma_uk = 0.08

    [output]
    path = out.csv
    format = csv

Every key is validated; unknown sections or keys are errors so that typos
in physics constants cannot pass silently.  All sections are optional and
default to the reference trap, a 1e5-atom gas at 10 uK, no channel
selection, no overrides, and CSV output to stdout.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass

from .channels import ChannelParams, SpinChannel, channel_params
from .constants import LI6_MASS_AMU
from .trap import GasState, TrapConfig

_KNOWN_KEYS = {
    "trap": ("omega_x_hz", "omega_y_hz", "omega_z_hz", "mass_amu", "depth_uk"),
    "gas": ("n_atoms", "temperature_uk"),
    "channel": ("pair",),
    "overrides": ("k_cm3uks", "gamma_uk", "mu_uk_per_g", "bf_g"),
    "output": ("path", "format"),
}

_OVERRIDE_FIELDS = {
    "k_cm3uks": "k",
    "gamma_uk": "gamma",
    "mu_uk_per_g": "mu",
    "bf_g": "b_f_exp",
}

_FORMATS = ("csv", "jsonl")

DEFAULT_TRAP_HZ = (2400.0, 5000.0, 5500.0)
DEFAULT_N_ATOMS = 1e5
DEFAULT_TEMPERATURE_UK = 10.0


class ConfigError(ValueError):
    """Malformed or invalid configuration text."""


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration shared by all subcommands."""

    trap: TrapConfig
    gas: GasState
    channel: SpinChannel | None = None
    overrides: dict[str, float] = dataclasses.field(default_factory=dict)
    output_path: str | None = None
    output_format: str = "csv"

    def channel_params(self, channel: "SpinChannel | str | None" = None) -> ChannelParams:
        """Catalog entry for `channel` (default: the configured channel),
        with any configured overrides applied."""
        if channel is None:
            channel = self.channel
        if channel is None:
            raise ConfigError(
                "no channel selected: pass --channel or set [channel] pair"
            )
        entry = channel_params(channel)
        if self.overrides:
            fields = {
                _OVERRIDE_FIELDS[key]: value
                for key, value in self.overrides.items()
            }
            entry = dataclasses.replace(entry, **fields)
        return entry


def default_config() -> RunConfig:
    """Configuration used when no config file is given."""
    return RunConfig(
        trap=TrapConfig.from_hz(*DEFAULT_TRAP_HZ),
        gas=GasState(DEFAULT_N_ATOMS, DEFAULT_TEMPERATURE_UK),
    )


def _positive(section: str, key: str, value: float) -> float:
    if not value > 0:
        raise ConfigError(f"[{section}] {key} must be positive, got {value}")
    return value


def parse_config(text: "str | bytes") -> RunConfig:
    """Parse and validate configuration text.

    Raises
    ------
    ConfigError
        On undecodable bytes, syntax errors (with line numbers), unknown
        sections or keys, unparseable numbers, or out-of-range values.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"config is not valid UTF-8: {exc}") from None
    parser = configparser.ConfigParser(
        interpolation=None,
        delimiters=("=",),
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#", ";"),
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from None

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(
                f"unknown config section [{section}]; expected one of "
                f"{sorted(_KNOWN_KEYS)}"
            )
        for key in parser[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(
                    f"unknown key {key!r} in section [{section}]; expected "
                    f"one of {list(_KNOWN_KEYS[section])}"
                )

    def get_float(section: str, key: str, default: float | None) -> float | None:
        raw = parser.get(section, key, fallback=None)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(
                f"[{section}] {key} must be a number, got {raw!r}"
            ) from None

    nu_x = _positive("trap", "omega_x_hz", get_float("trap", "omega_x_hz", DEFAULT_TRAP_HZ[0]))
    nu_y = _positive("trap", "omega_y_hz", get_float("trap", "omega_y_hz", DEFAULT_TRAP_HZ[1]))
    nu_z = _positive("trap", "omega_z_hz", get_float("trap", "omega_z_hz", DEFAULT_TRAP_HZ[2]))
    mass_amu = _positive("trap", "mass_amu", get_float("trap", "mass_amu", LI6_MASS_AMU))
    depth_uk = get_float("trap", "depth_uk", None)
    if depth_uk is not None:
        _positive("trap", "depth_uk", depth_uk)
    trap = TrapConfig.from_hz(nu_x, nu_y, nu_z, mass_amu=mass_amu, depth_uk=depth_uk)

    n_atoms = get_float("gas", "n_atoms", DEFAULT_N_ATOMS)
    temperature = _positive(
        "gas", "temperature_uk", get_float("gas", "temperature_uk", DEFAULT_TEMPERATURE_UK)
    )
    if not n_atoms >= 0:
        raise ConfigError(f"[gas] n_atoms must be >= 0, got {n_atoms}")
    gas = GasState(n_atoms, temperature)

    channel = None
    pair = parser.get("channel", "pair", fallback=None)
    if pair is not None:
        try:
            channel = SpinChannel.from_label(pair)
            channel_params(channel)
        except ValueError as exc:
            raise ConfigError(f"[channel] pair: {exc}") from None

    overrides: dict[str, float] = {}
    if parser.has_section("overrides"):
        for key in parser["overrides"]:
            overrides[key] = _positive(
                "overrides", key, get_float("overrides", key, None)
            )

    output_path = parser.get("output", "path", fallback=None)
    output_format = parser.get("output", "format", fallback="csv")
    if output_format not in _FORMATS:
        raise ConfigError(
            f"[output] format must be one of {_FORMATS}, got {output_format!r}"
        )

    return RunConfig(
        trap=trap,
        gas=gas,
        channel=channel,
        overrides=overrides,
        output_path=output_path,
        output_format=output_format,
    )
