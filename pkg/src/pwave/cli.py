"""Command-line frontend: configuration loading and all file I/O.

Every scientific module is reachable as a subcommand::

    pwave channels list [--csv]
    pwave g2 --channel 1/2,-1/2 --t-uk 10 --b-g 186.5 [--exact|--asymptotic]
    pwave g2-scan --channel 1/2,-1/2 --t-uk 10 --b-min 186 --b-max 188 --points 40
    pwave decay --g2 3e-12 --t-max 1 --points 60 [--noise 0.05 --seed 1]
    pwave scan --channel 1/2,-1/2 --b-min 186 --b-max 187.5 --points 40 --t-wait 0.05
    pwave fit-decay --in curve.csv --model both
    pwave fit-detuning --in g2_vs_t.csv --channel -1/2,-1/2 [--exact]
    pwave threshold-ratio --l3-low 5e-26 --l3-high 1e-24 --t-low 2 --t-high 8
    pwave ramp --channel 1/2,-1/2 --efficiency 0.22 [--noise 0.07 --seed 1]
    pwave reproduce {table1,table2,eq4-check,width,fraction,all}

Exit codes: 0 success, 1 computation or validation failure, 2 usage error.
A config file may be given with ``--config`` or the ``PWAVE_CONFIG``
environment variable; command-line flags override configured values.
Identical (config, argv, seed) always produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import channels as channels_mod
from .channels import CATALOG, ChannelParams
from .config import ConfigError, RunConfig, default_config, parse_config
from .dynamics import (
    DecayCurve,
    LossRates,
    dip_metrics,
    simulate_decay,
    simulate_field_scan,
    synthesize_noisy_curve,
)
from .inference import RatePoint, fit_decay, fit_detuning, threshold_ratio
from .loss_model import (
    detuning,
    g2_thermal_asymptotic,
    g2_thermal_exact,
    peak_detuning,
    resonance_width_estimate,
)
from .ramp import PathCounts, RampProtocol, molecule_fraction, run_two_path
from .trap import GasState

CONFIG_ENV_VAR = "PWAVE_CONFIG"
DEFAULT_SEED = 12345

_DECAY_HEADER = ["t_s", "n_atoms"]
_DECAY_HEADER_SIGMA = ["t_s", "n_atoms", "sigma_n"]
_SCAN_HEADER = ["b_g", "n_atoms"]
_G2_SCAN_HEADER = ["b_g", "delta_uk", "g2_exact_cm3s", "g2_asym_cm3s"]
_RATES_HEADER = ["t_uk", "g2_cm3s", "sigma_g2_cm3s"]

# Maps internal fit-parameter names to the units-bearing names used on
# `param.` output lines.
_PARAM_LABELS = {"n0": "n0", "g2": "g2_cm3s", "l3": "l3_cm6s", "db": "db_g"}


def _fmt(value) -> str:
    """Shortest round-trip decimal representation (deterministic)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _render_rows(header: list[str], rows, fmt: str) -> str:
    if fmt == "jsonl":
        lines = [
            json.dumps(dict(zip(header, [float(v) for v in row])))
            for row in rows
        ]
        return "\n".join(lines) + "\n"
    buf = [",".join(header)]
    buf.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(buf) + "\n"


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_rows(args, cfg: RunConfig, header: list[str], rows):
    fmt = getattr(args, "format", None) or cfg.output_format
    path = getattr(args, "out", None) or cfg.output_path
    _emit(_render_rows(header, rows, fmt), path)


def _read_table(path: str, expected_headers: list[list[str]]) -> tuple[list[str], list[list[float]]]:
    """Read a CSV file and validate its header against the accepted schemas."""
    text = Path(path).read_text(encoding="utf-8")
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    header = rows[0]
    if header not in expected_headers:
        expected = " or ".join(",".join(h) for h in expected_headers)
        raise ValueError(
            f"{path}: unexpected CSV header {','.join(header)!r}; expected {expected}"
        )
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(
                f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
            )
        try:
            data.append([float(cell) for cell in row])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric field in {row}") from None
    if not data:
        raise ValueError(f"{path}: CSV has a header but no data rows")
    return header, data


def _read_decay_curve(path: str) -> DecayCurve:
    header, data = _read_table(path, [_DECAY_HEADER, _DECAY_HEADER_SIGMA])
    columns = np.array(data, dtype=float).T
    sigma = columns[2] if len(header) == 3 else None
    return DecayCurve(times=columns[0], atoms=columns[1], sigma=sigma)


def _read_rate_points(path: str) -> list[RatePoint]:
    _header, data = _read_table(path, [_RATES_HEADER])
    return [RatePoint(*row) for row in data]


def _print_kv(key: str, value):
    print(f"{key}={_fmt(value)}")


def _resolve_channel(args, cfg: RunConfig) -> ChannelParams:
    return cfg.channel_params(getattr(args, "channel", None))


def _gas_from_args(args, cfg: RunConfig) -> GasState:
    n0 = getattr(args, "n0", None)
    t_uk = getattr(args, "t_uk", None)
    return GasState(
        n0 if n0 is not None else cfg.gas.n_atoms,
        t_uk if t_uk is not None else cfg.gas.temperature,
    )


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_channels(args, cfg: RunConfig) -> int:
    if args.csv:
        sys.stdout.write(channels_mod.catalog_csv())
    else:
        print(channels_mod.catalog_table())
    return 0


def _cmd_g2(args, cfg: RunConfig) -> int:
    channel = _resolve_channel(args, cfg)
    t_uk = args.t_uk if args.t_uk is not None else cfg.gas.temperature
    delta = detuning(args.b_g, channel)
    _print_kv("channel", f"({channel.channel.label})")
    _print_kv("b_g", args.b_g)
    _print_kv("b_f_g", channel.b_f())
    _print_kv("t_uk", t_uk)
    _print_kv("delta_uk", delta.delta)
    if not args.asymptotic:
        _print_kv("g2_exact_cm3s", g2_thermal_exact(t_uk, delta, channel))
    if not args.exact:
        asym = g2_thermal_asymptotic(t_uk, delta, channel)
        _print_kv("g2_asym_cm3s", asym.value)
        _print_kv("asym_in_regime", asym.in_regime)
    return 0


def _cmd_g2_scan(args, cfg: RunConfig) -> int:
    channel = _resolve_channel(args, cfg)
    t_uk = args.t_uk if args.t_uk is not None else cfg.gas.temperature
    if args.points < 2:
        raise ValueError(f"--points must be at least 2, got {args.points}")
    if not args.b_min < args.b_max:
        raise ValueError("--b-min must be below --b-max")
    rows = []
    for b in np.linspace(args.b_min, args.b_max, args.points):
        delta = detuning(b, channel)
        rows.append(
            [
                b,
                delta.delta,
                g2_thermal_exact(t_uk, delta, channel),
                g2_thermal_asymptotic(t_uk, delta, channel).value,
            ]
        )
    _emit_rows(args, cfg, _G2_SCAN_HEADER, rows)
    return 0


def _cmd_decay(args, cfg: RunConfig) -> int:
    gas = _gas_from_args(args, cfg)
    rates = LossRates(
        g2=args.g2, l3=args.l3, one_body_rate=args.one_body_rate
    )
    if args.points < 2:
        raise ValueError(f"--points must be at least 2, got {args.points}")
    if not args.t_max > 0:
        raise ValueError(f"--t-max must be positive, got {args.t_max}")
    times = np.linspace(0.0, args.t_max, args.points)
    curve = simulate_decay(gas, rates, cfg.trap, times)
    if args.noise > 0:
        curve = synthesize_noisy_curve(curve, args.noise, args.seed)
        header = _DECAY_HEADER_SIGMA
        rows = list(zip(curve.times, curve.atoms, curve.sigma))
    else:
        header = _DECAY_HEADER
        rows = list(zip(curve.times, curve.atoms))
    _emit_rows(args, cfg, header, rows)
    return 0


def _cmd_scan(args, cfg: RunConfig) -> int:
    channel = _resolve_channel(args, cfg)
    gas = _gas_from_args(args, cfg)
    if args.points < 2:
        raise ValueError(f"--points must be at least 2, got {args.points}")
    if not args.b_min < args.b_max:
        raise ValueError("--b-min must be below --b-max")
    background = LossRates(one_body_rate=args.one_body_rate)
    scan = simulate_field_scan(
        gas,
        channel,
        cfg.trap,
        np.linspace(args.b_min, args.b_max, args.points),
        t_wait=args.t_wait,
        background=background,
    )
    atoms = scan.atoms
    if args.noise > 0:
        rng = np.random.default_rng(args.seed)
        atoms = np.clip(
            atoms * (1.0 + args.noise * rng.standard_normal(atoms.shape)),
            0.0,
            None,
        )
    _emit_rows(args, cfg, _SCAN_HEADER, list(zip(scan.b_fields, atoms)))
    return 0


def _print_fit_report(result, comment_lines: list[str]):
    for line in comment_lines:
        print(f"# {line}")
    names = result.names
    for name in names:
        _print_kv(f"param.{_PARAM_LABELS.get(name, name)}", result.parameters[name])
    for name in names:
        _print_kv(f"sigma.{_PARAM_LABELS.get(name, name)}", result.sigma(name))
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            if j < i:
                continue
            _print_kv(f"cov.{a}.{b}", result.covariance[i, j])
    _print_kv("residual_norm", result.residual_norm)
    _print_kv("converged", result.converged)
    _print_kv("iterations", result.iterations)


def _cmd_fit_decay(args, cfg: RunConfig) -> int:
    curve = _read_decay_curve(args.infile)
    t_uk = args.t_uk if args.t_uk is not None else cfg.gas.temperature
    result = fit_decay(
        curve,
        cfg.trap,
        t_uk,
        model=args.model,
        one_body_rate=args.one_body_rate,
    )
    comments = [
        "fit-decay report",
        f"input={args.infile} samples={len(curve)} model={args.model}",
        f"temperature_uk={_fmt(t_uk)} weighted={'yes' if curve.sigma is not None else 'uniform'}",
    ]
    _print_fit_report(result, comments)
    return 0


def _cmd_fit_detuning(args, cfg: RunConfig) -> int:
    channel = _resolve_channel(args, cfg)
    points = _read_rate_points(args.infile)
    result = fit_detuning(points, channel, use_exact=args.exact)
    comments = [
        "fit-detuning report",
        f"input={args.infile} points={len(points)} channel=({channel.channel.label})",
        f"model={'exact' if args.exact else 'asymptotic'}",
        f"implied hold field b_g={_fmt(channel.b_f() + result.parameters['db'])}",
    ]
    _print_fit_report(result, comments)
    return 0


def _cmd_threshold_ratio(args, cfg: RunConfig) -> int:
    verdict = threshold_ratio(
        args.l3_low, args.l3_high, args.t_low, args.t_high, args.lambda_bound
    )
    _print_kv("ratio", verdict.ratio)
    _print_kv("bound", verdict.bound)
    print(f"classification={verdict.classification}")
    return 0


def _load_protocol(path: str | None) -> RampProtocol:
    if path is None:
        return RampProtocol()
    import configparser

    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string(Path(path).read_text(encoding="utf-8"))
    except configparser.Error as exc:
        raise ConfigError(f"protocol file syntax error: {exc}") from None
    known = ("b_start_g", "b_nuc_g", "b_dissoc_g", "b_deep_g", "t_assoc_s", "t_path_s")
    fields = {}
    for section in parser.sections():
        if section != "protocol":
            raise ConfigError(
                f"unknown section [{section}] in protocol file; expected [protocol]"
            )
        for key in parser["protocol"]:
            if key not in known:
                raise ConfigError(
                    f"unknown key {key!r} in [protocol]; expected one of {list(known)}"
                )
            try:
                fields[key.rsplit("_", 1)[0]] = float(parser["protocol"][key])
            except ValueError:
                raise ConfigError(
                    f"[protocol] {key} must be a number, got {parser['protocol'][key]!r}"
                ) from None
    return RampProtocol(**fields)


def _cmd_ramp(args, cfg: RunConfig) -> int:
    channel = _resolve_channel(args, cfg)
    gas = _gas_from_args(args, cfg)
    protocol = _load_protocol(args.protocol)
    counts = run_two_path(
        protocol,
        args.efficiency,
        gas,
        channel,
        cfg.trap,
        include_losses=not args.no_losses,
        noise_fraction=args.noise,
        seed=args.seed,
    )
    fraction = molecule_fraction(counts)
    _print_kv("n1", counts.n1)
    _print_kv("sigma1", counts.sigma1)
    _print_kv("n2", counts.n2)
    _print_kv("sigma2", counts.sigma2)
    _print_kv("fraction", fraction.fraction)
    _print_kv("sigma_fraction", fraction.sigma)
    _print_kv("molecules", fraction.molecules)
    return 0


# ---------------------------------------------------------------------------
# reproduce: canned reference computations

_TABLE1_REFERENCE = {
    "1/2,1/2": (159.0, 160.2, 0.6),
    "1/2,-1/2": (185.0, 186.2, 0.6),
    "-1/2,-1/2": (215.0, 215.2, 0.6),
}
_TABLE2_REFERENCE = {
    "1/2,-1/2": (1.21e-13, 0.05, 117.0),
    "-1/2,-1/2": (7.33e-13, 0.08, 111.0),
}


def _check_table1() -> list[tuple[bool, str]]:
    results = []
    for entry in CATALOG:
        ref = _TABLE1_REFERENCE[entry.channel.label]
        ok = (entry.b_f_theory, entry.b_f_exp, entry.b_f_exp_err) == ref
        results.append(
            (
                ok,
                f"table1 ({entry.channel.label}): theory {entry.b_f_theory:g} G, "
                f"measured {entry.b_f_exp:g}({entry.b_f_exp_err:g}) G",
            )
        )
    return results


def _check_table2() -> list[tuple[bool, str]]:
    results = []
    for entry in CATALOG:
        if entry.channel.label in _TABLE2_REFERENCE:
            ref = _TABLE2_REFERENCE[entry.channel.label]
            ok = (entry.k, entry.gamma, entry.mu) == ref
            results.append(
                (
                    ok,
                    f"table2 ({entry.channel.label}): K={entry.k:g} cm^3 uK/s, "
                    f"gamma={entry.gamma:g} uK, mu={entry.mu:g} uK/G",
                )
            )
        else:
            ok = not entry.has_two_body
            results.append(
                (ok, f"table2 ({entry.channel.label}): no two-body parameters")
            )
    return results


def _check_eq4() -> list[tuple[bool, str]]:
    worst = 0.0
    for label in _TABLE2_REFERENCE:
        entry = channels_mod.channel_params(label)
        for t_uk in (5.0, 10.0, 15.0):
            for ratio in (3.0, 4.0, 6.0, 8.0, 10.0):
                delta = ratio * t_uk
                exact = g2_thermal_exact(t_uk, delta, entry)
                approx = g2_thermal_asymptotic(t_uk, delta, entry).value
                worst = max(worst, abs(approx / exact - 1.0))
    ok = worst <= 0.05
    return [
        (
            ok,
            "eq4-check: closed form vs quadrature, max deviation "
            f"{worst:.2%} over delta/T in [3,10] (tolerance 5%)",
        )
    ]


def _check_width() -> list[tuple[bool, str]]:
    entry = channels_mod.channel_params("1/2,-1/2")
    t_uk = 15.0
    estimate = resonance_width_estimate(t_uk, entry)
    ok_est = 0.10 <= estimate <= 0.16
    results = [
        (
            ok_est,
            f"width: thermal estimate T/mu = {estimate:.3f} G at {t_uk:g} uK "
            "(expected 0.10-0.16 G)",
        )
    ]
    b_f = entry.b_f()
    scan = simulate_field_scan(
        GasState(1e5, t_uk),
        entry,
        default_config().trap,
        np.linspace(b_f - 0.8, b_f + 2.5, 331),
        t_wait=0.05,
    )
    metrics = dip_metrics(scan)
    peak_offset = peak_detuning(t_uk) / entry.mu
    ok_min = abs(metrics.b_min - (b_f + peak_offset)) <= 0.011
    results.append(
        (
            ok_min,
            f"width: dip minimum at {metrics.b_min:.3f} G vs B_F + 1.5 T/mu = "
            f"{b_f + peak_offset:.3f} G",
        )
    )
    factor = metrics.fwhm / estimate
    ok_width = factor <= 2.0
    results.append(
        (
            ok_width,
            f"width: simulated dip FWHM {metrics.fwhm:.3f} G = {factor:.2f} x "
            "thermal estimate (thermal tail + saturation broaden beyond "
            "the factor-2 band)",
        )
    )
    return results


def _check_fraction() -> list[tuple[bool, str]]:
    fraction = molecule_fraction(PathCounts(7.1e4, 0.5e4, 9.1e4, 0.7e4))
    ok = (
        round(fraction.fraction, 2) == 0.22
        and round(fraction.sigma, 2) == 0.08
        and abs(fraction.fraction - 0.2) <= 0.1
    )
    results = [
        (
            ok,
            f"fraction: 1 - N1/N2 = {fraction.fraction:.2f} +/- "
            f"{fraction.sigma:.2f} ({fraction.molecules:.0f} molecules), "
            "consistent with 0.2(1)",
        )
    ]
    entry = channels_mod.channel_params("1/2,-1/2")
    counts = run_two_path(
        RampProtocol(),
        0.22,
        GasState(1e5, 10.0),
        entry,
        default_config().trap,
        include_losses=False,
    )
    identity = molecule_fraction(counts).fraction
    ok_id = abs(identity - 0.22) <= 1e-12
    results.append(
        (
            ok_id,
            f"fraction: lossless two-path run returns the association "
            f"efficiency exactly ({identity:.3f} for 0.22)",
        )
    )
    return results


_REPRODUCE_ITEMS = {
    "table1": _check_table1,
    "table2": _check_table2,
    "eq4-check": _check_eq4,
    "width": _check_width,
    "fraction": _check_fraction,
}


def _cmd_reproduce(args, cfg: RunConfig) -> int:
    items = list(_REPRODUCE_ITEMS) if args.item == "all" else [args.item]
    all_ok = True
    for item in items:
        for ok, message in _REPRODUCE_ITEMS[item]():
            print(f"{'PASS' if ok else 'FAIL'}: {message}")
            all_ok = all_ok and ok
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# Parser assembly


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwave",
        description=(
            "Simulate and fit atom-loss dynamics near p-wave Feshbach "
            "resonances of ultracold 6Li."
        ),
    )
    parser.add_argument(
        "--config",
        default=None,
        help=f"config file path (default: ${CONFIG_ENV_VAR} if set)",
    )
    sub = parser.add_subparsers(dest="command", metavar="subcommand")

    p = sub.add_parser("channels", help="spin-channel catalog")
    p.add_argument("action", choices=["list"], help="list the catalog")
    p.add_argument("--csv", action="store_true", help="emit CSV instead of a table")
    p.set_defaults(handler=_cmd_channels)

    def add_channel(p, required=False):
        p.add_argument(
            "--channel",
            required=required,
            default=None,
            help="spin channel label, e.g. 1/2,-1/2 (default: from config)",
        )

    def add_output(p):
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument(
            "--format", choices=["csv", "jsonl"], default=None,
            help="output format (default: csv or the configured format)",
        )

    p = sub.add_parser("g2", help="two-body loss rate at one field")
    add_channel(p)
    p.add_argument("--t-uk", type=float, default=None, help="temperature in uK")
    p.add_argument("--b-g", type=float, required=True, help="magnetic field in G")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", help="print only the quadrature rate")
    group.add_argument("--asymptotic", action="store_true", help="print only the closed-form rate")
    p.set_defaults(handler=_cmd_g2)

    p = sub.add_parser("g2-scan", help="two-body loss rate over a field grid")
    add_channel(p)
    p.add_argument("--t-uk", type=float, default=None, help="temperature in uK")
    p.add_argument("--b-min", type=float, required=True, help="first field in G")
    p.add_argument("--b-max", type=float, required=True, help="last field in G")
    p.add_argument("--points", type=int, default=60, help="grid size (default 60)")
    add_output(p)
    p.set_defaults(handler=_cmd_g2_scan)

    p = sub.add_parser("decay", help="simulate an atom-number decay curve")
    p.add_argument("--g2", type=float, default=0.0, help="two-body coefficient in cm^3/s")
    p.add_argument("--l3", type=float, default=0.0, help="three-body coefficient in cm^6/s")
    p.add_argument(
        "--one-body-rate", type=float, default=0.0,
        help="one-body loss rate in 1/s (default 0)",
    )
    p.add_argument("--n0", type=float, default=None, help="initial atom number")
    p.add_argument("--t-uk", type=float, default=None, help="temperature in uK")
    p.add_argument("--t-max", type=float, required=True, help="last sample time in s")
    p.add_argument("--points", type=int, default=50, help="number of samples (default 50)")
    p.add_argument("--noise", type=float, default=0.0, help="relative multiplicative noise")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    add_output(p)
    p.set_defaults(handler=_cmd_decay)

    p = sub.add_parser("scan", help="simulate remaining atoms vs magnetic field")
    add_channel(p)
    p.add_argument("--b-min", type=float, required=True, help="first field in G")
    p.add_argument("--b-max", type=float, required=True, help="last field in G")
    p.add_argument("--points", type=int, default=60, help="grid size (default 60)")
    p.add_argument("--t-wait", type=float, default=0.05, help="hold time in s (default 0.05)")
    p.add_argument("--n0", type=float, default=None, help="initial atom number")
    p.add_argument("--t-uk", type=float, default=None, help="temperature in uK")
    p.add_argument(
        "--one-body-rate", type=float, default=0.0,
        help="background one-body rate in 1/s (default 0)",
    )
    p.add_argument("--noise", type=float, default=0.0, help="relative multiplicative noise")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    add_output(p)
    p.set_defaults(handler=_cmd_scan)

    p = sub.add_parser("fit-decay", help="fit loss coefficients to a decay curve")
    p.add_argument("--in", dest="infile", required=True, help="decay CSV (t_s,n_atoms[,sigma_n])")
    p.add_argument(
        "--model", choices=["two_body", "three_body", "both"], default="both",
        help="loss terms to fit (default both)",
    )
    p.add_argument("--t-uk", type=float, default=None, help="temperature in uK")
    p.add_argument(
        "--one-body-rate", type=float, default=0.0,
        help="known one-body rate in 1/s, not fitted (default 0)",
    )
    p.set_defaults(handler=_cmd_fit_decay)

    p = sub.add_parser("fit-detuning", help="fit the hold-field offset from g2(T) data")
    p.add_argument("--in", dest="infile", required=True, help=f"CSV ({','.join(_RATES_HEADER)})")
    add_channel(p, required=True)
    p.add_argument("--exact", action="store_true", help="fit with the quadrature average")
    p.set_defaults(handler=_cmd_fit_detuning)

    p = sub.add_parser("threshold-ratio", help="three-body threshold-law ratio test")
    p.add_argument("--l3-low", type=float, required=True, help="L3 at the lower temperature, cm^6/s")
    p.add_argument("--l3-high", type=float, required=True, help="L3 at the higher temperature, cm^6/s")
    p.add_argument("--t-low", type=float, required=True, help="lower temperature in uK")
    p.add_argument("--t-high", type=float, required=True, help="higher temperature in uK")
    p.add_argument("--lambda-bound", type=float, default=2.0, help="threshold exponent bound (default 2)")
    p.set_defaults(handler=_cmd_threshold_ratio)

    p = sub.add_parser("ramp", help="two-path magneto-association simulation")
    add_channel(p)
    p.add_argument("--efficiency", type=float, required=True, help="association efficiency in [0,1]")
    p.add_argument("--n0", type=float, default=None, help="initial atom number")
    p.add_argument("--t-uk", type=float, default=None, help="temperature in uK")
    p.add_argument("--noise", type=float, default=0.07, help="shot-noise fraction (default 0.07)")
    p.add_argument(
        "--seed", type=int, default=None,
        help="jitter the counts with this RNG seed (default: no jitter)",
    )
    p.add_argument("--protocol", default=None, help="protocol file with a [protocol] section")
    p.add_argument("--no-losses", action="store_true", help="disable ramp losses")
    p.set_defaults(handler=_cmd_ramp)

    p = sub.add_parser("reproduce", help="re-run reference computations and report PASS/FAIL")
    p.add_argument("item", choices=sorted(_REPRODUCE_ITEMS) + ["all"], help="which check to run")
    p.set_defaults(handler=_cmd_reproduce)

    return parser


def _normalize_argv(argv: list[str]) -> list[str]:
    """Join `--channel -1/2,-1/2` into `--channel=-1/2,-1/2` so labels
    beginning with a dash are not mistaken for options."""
    out = []
    tokens = iter(argv)
    for token in tokens:
        if token == "--channel":
            value = next(tokens, None)
            if value is None:
                out.append(token)
            else:
                out.append(f"--channel={value}")
        else:
            out.append(token)
    return out


def run(argv: list[str]) -> int:
    """Execute one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(_normalize_argv(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
        if config_path:
            cfg = parse_config(Path(config_path).read_bytes())
        else:
            cfg = default_config()
        return args.handler(args, cfg)
    except (ConfigError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
