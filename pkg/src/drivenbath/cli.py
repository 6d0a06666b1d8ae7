"""Command-line frontend.

Subcommands: wcf, wdf, wext, engine, sweep, verify.  Physical defaults
match the reference figure conventions (lambda0 = 0.01, t_int = 100,
l_c = 1); every value can come from an INI-style config file and be
overridden by a flag.  Exit codes: 0 success, 1 numerical/verification
failure, 2 usage or configuration error.

All output files are UTF-8 CSV with a single '#' header row and
17-significant-digit scientific notation, and identical configuration
always produces byte-identical files.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import sweep as sweepmod
from . import thermo, verify, workstats
from .model import (Coupling, DrivenSource, OhmicSpectrum, QubitSpec,
                    SystemSpec, validate)
from .quadrature import QuadratureError, default_plan

_CONFIG_SCHEMA = {
    "bath": {"alpha", "beta", "lc"},
    "drive": {"lambda0", "tint"},
    "qubit": {"coupling", "omega", "p"},
    "wcf": {"vmax", "samples", "nonperturbative"},
    "wdf": {"samples", "nonperturbative"},
    "sweep": {"x", "y", "x_start", "x_stop", "x_scale",
              "y_start", "y_stop", "y_scale", "nx", "ny", "quantity"},
    "output": {"out"},
}

_QUANTITIES = {q.value: q for q in sweepmod.Quantity}


class ConfigError(ValueError):
    pass


def _load_config(path: Optional[str]) -> dict:
    """Flat {section.key: string} mapping; unknown keys are rejected."""
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for section in parser.sections():
        if section not in _CONFIG_SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in _CONFIG_SCHEMA[section]:
                raise ConfigError(
                    f"unknown key {key!r} in config section [{section}]")
            values[f"{section}.{key}"] = value
    return values


def _pick(args_value, config: dict, key: str, cast, default):
    """Precedence: command-line flag, then config file, then default."""
    if args_value is not None:
        return args_value
    if key in config:
        raw = config[key]
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default


def _build_spec(args, config: dict) -> SystemSpec:
    alpha = _pick(args.alpha, config, "bath.alpha", float, 5.0)
    beta = _pick(args.beta, config, "bath.beta", float, 1.0)
    lc = _pick(args.lc, config, "bath.lc", float, 1.0)
    lambda0 = _pick(args.lambda0, config, "drive.lambda0", float, 0.01)
    tint = _pick(args.tint, config, "drive.tint", float, 100.0)
    qubit_kind = _pick(args.qubit, config, "qubit.coupling", str, "none")
    omega = _pick(args.omega, config, "qubit.omega", float, 0.05)
    p = _pick(args.p, config, "qubit.p", float, 1.0)

    qubit = None
    if qubit_kind != "none":
        try:
            coupling = Coupling(qubit_kind)
        except ValueError:
            raise ConfigError(
                f"unknown qubit coupling {qubit_kind!r} "
                "(expected none|spin|fermion|topological)") from None
        qubit = QubitSpec(coupling=coupling, omega_gap=omega, p_ground=p)

    spec = SystemSpec(beta=beta, spectrum=OhmicSpectrum(alpha=alpha, l_c=lc),
                      source=DrivenSource(lambda0=lambda0, t_int=tint),
                      qubit=qubit)
    report = validate(spec)
    if not report.is_valid:
        raise ConfigError("; ".join(report.errors))
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return spec


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _write_csv(path: Path, header: str, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# " + header + "\n")
        for row in rows:
            fh.write(",".join("" if cell is None else
                              (cell if isinstance(cell, str) else _fmt(cell))
                              for cell in row) + "\n")


def _out_path(args, config: dict, default: str) -> Path:
    return Path(_pick(args.out, config, "output.out", str, default))


def cmd_wcf(args, config: dict) -> int:
    spec = _build_spec(args, config)
    v_max = _pick(args.vmax, config, "wcf.vmax", float,
                  64.0 * spec.source.t_int)
    samples = _pick(args.samples, config, "wcf.samples", int, 201)
    nonpert = args.nonperturbative or _pick(None, config,
                                            "wcf.nonperturbative", bool, False)
    if nonpert and spec.qubit is not None:
        raise ConfigError("all-order characteristic function is available "
                          "only for the pure thermal bath")
    v = np.linspace(0.0, v_max, samples)
    field = workstats.chi2_field(spec, v)
    chi = field.chi2_values()
    if nonpert:
        chi_full = np.exp(chi - 1.0)
        rows = [(v[i], chi[i].real, chi[i].imag,
                 chi_full[i].real, chi_full[i].imag) for i in range(samples)]
        header = "v,re_chi2,im_chi2,re_chi,im_chi"
    else:
        rows = [(v[i], chi[i].real, chi[i].imag) for i in range(samples)]
        header = "v,re_chi2,im_chi2"
    _write_csv(_out_path(args, config, "wcf.csv"), header, rows)
    return 0


def _with_suffix(path: Path, tag: str) -> Path:
    return path.with_name(path.stem + tag + path.suffix)


def cmd_wdf(args, config: dict) -> int:
    spec = _build_spec(args, config)
    samples = _pick(args.samples, config, "wdf.samples", int, 800)
    nonpert = args.nonperturbative or _pick(None, config,
                                            "wdf.nonperturbative", bool, False)
    if nonpert and spec.qubit is not None:
        raise ConfigError("all-order characteristic function is available "
                          "only for the pure thermal bath")
    w_grid = workstats.default_w_grid(spec.source, n=samples)
    dist = workstats.wdf2(spec, w_grid=w_grid)
    out = _out_path(args, config, "wdf.csv")
    header = (f"w,density,atom_weight={_fmt(dist.atom_weight)},"
              f"normalization={_fmt(dist.normalization)}")
    _write_csv(out, header,
               zip(dist.w_grid.tolist(), dist.density.tolist()))
    if nonpert:
        full = workstats.wdf_nonperturbative(spec, default_plan(spec.source))
        header = (f"w,density,atom_weight={_fmt(full.atom_weight)},"
                  f"normalization={_fmt(full.normalization)}")
        _write_csv(_with_suffix(out, "_nonperturbative"), header,
                   zip(full.w_grid.tolist(), full.density.tolist()))
    return 0


def cmd_wext(args, config: dict) -> int:
    spec = _build_spec(args, config)
    value = workstats.w_ext2(spec)
    _write_csv(_out_path(args, config, "wext.csv"), "w_ext2", [(value,)])
    print(f"w_ext2 = {_fmt(value)}")
    return 0


def cmd_engine(args, config: dict) -> int:
    spec = _build_spec(args, config)
    if spec.qubit is None:
        raise ConfigError("engine analysis requires a qubit")
    if not spec.qubit.p_ground > 0.5:
        raise ConfigError(
            "population-inverted or infinite-temperature qubit excluded "
            "from engine analysis (requires p > 1/2)")
    report = thermo.engine_report(spec)
    _write_csv(_out_path(args, config, "engine.csv"),
               "mode,w_bar,delta_s,q_b,q_q,t_h,t_l,r,figure_of_merit",
               [(report.mode.value, report.w_bar, report.delta_s,
                 report.q_b, report.q_q, report.t_h, report.t_l,
                 report.r, report.figure_of_merit)])
    print(f"mode = {report.mode.value}, figure_of_merit = "
          f"{_fmt(report.figure_of_merit)}, delta_s = {_fmt(report.delta_s)}")
    return 0


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"expected 'low,high', got {text!r}") from None
    return lo, hi


def cmd_sweep(args, config: dict) -> int:
    spec = _build_spec(args, config)
    x_name = _pick(args.sweep_x, config, "sweep.x", str, None)
    y_name = _pick(args.sweep_y, config, "sweep.y", str, None)
    if x_name is None or y_name is None:
        raise ConfigError("sweep requires --sweep-x and --sweep-y")
    if args.x_range is not None:
        x_start, x_stop = _parse_range(args.x_range)
    else:
        x_start = _pick(None, config, "sweep.x_start", float, None)
        x_stop = _pick(None, config, "sweep.x_stop", float, None)
    if args.y_range is not None:
        y_start, y_stop = _parse_range(args.y_range)
    else:
        y_start = _pick(None, config, "sweep.y_start", float, None)
        y_stop = _pick(None, config, "sweep.y_stop", float, None)
    if None in (x_start, x_stop, y_start, y_stop):
        raise ConfigError("sweep requires ranges for both axes")
    quantity_name = _pick(args.quantity, config, "sweep.quantity", str, "wext")
    if quantity_name not in _QUANTITIES:
        raise ConfigError(f"unknown quantity {quantity_name!r} (expected "
                          + "|".join(_QUANTITIES))
    try:
        plan = sweepmod.SweepPlan(
            x=sweepmod.Axis(x_name, x_start, x_stop,
                            _pick(args.nx, config, "sweep.nx", int, 64),
                            _pick(args.x_scale, config, "sweep.x_scale",
                                  str, "linear")),
            y=sweepmod.Axis(y_name, y_start, y_stop,
                            _pick(args.ny, config, "sweep.ny", int, 64),
                            _pick(args.y_scale, config, "sweep.y_scale",
                                  str, "linear")),
            fixed=spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    result = sweepmod.run_sweep(plan, _QUANTITIES[quantity_name],
                                threads=args.threads)
    out_dir = _out_path(args, config, "sweep_out")
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for i, x in enumerate(result.xs):
        for j, y in enumerate(result.ys):
            value = result.grid[i, j]
            rows.append((float(x), float(y),
                         None if np.isnan(value) else float(value)))
    _write_csv(out_dir / "grid.csv", f"{x_name},{y_name},{quantity_name}",
               rows)
    _write_contours(out_dir / "contour.csv", x_name, y_name,
                    result.zero_contour)
    _write_contours(out_dir / "betaq.csv", x_name, y_name,
                    result.betaq_contour)
    print(f"sweep written to {out_dir} "
          f"({len(result.failures)} failed cells)")
    return 0


def _write_contours(path: Path, x_name: str, y_name: str,
                    polylines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {x_name},{y_name}\n")
        for idx, line in enumerate(polylines):
            if idx:
                fh.write("\n")
            for x, y in line:
                fh.write(f"{_fmt(x)},{_fmt(y)}\n")


def cmd_verify(args, config: dict) -> int:
    results = verify.run_all(names=args.checks or None)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: worst = {res.worst:.3e} "
              f"(tolerance {res.tolerance:.3e})")
        if args.verbose and res.detail:
            for line in res.detail.splitlines():
                print(f"    {line}")
        failed += 0 if res.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, help="Ohmic exponent")
    parser.add_argument("--beta", type=float, help="bath inverse temperature")
    parser.add_argument("--lc", type=float, help="bath cutoff length")
    parser.add_argument("--lambda0", type=float, help="drive amplitude")
    parser.add_argument("--tint", type=float, help="drive interaction time")
    parser.add_argument("--qubit",
                        choices=["none", "spin", "fermion", "topological"],
                        help="qubit coupling type")
    parser.add_argument("--omega", type=float, help="qubit level spacing")
    parser.add_argument("--p", type=float, help="qubit ground population")
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--out", help="output path")
    parser.add_argument("--threads", type=int,
                        help="worker threads for sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drivenbath",
        description="Work statistics of a cyclically driven Ohmic bath "
                    "with optional qubit coupling")
    sub = parser.add_subparsers(dest="command", required=True)

    p_wcf = sub.add_parser("wcf", help="characteristic function samples")
    _add_common(p_wcf)
    p_wcf.add_argument("--vmax", type=float)
    p_wcf.add_argument("--samples", type=int)
    p_wcf.add_argument("--nonperturbative", action="store_true")
    p_wcf.set_defaults(func=cmd_wcf)

    p_wdf = sub.add_parser("wdf", help="work distribution")
    _add_common(p_wdf)
    p_wdf.add_argument("--samples", type=int)
    p_wdf.add_argument("--nonperturbative", action="store_true")
    p_wdf.set_defaults(func=cmd_wdf)

    p_wext = sub.add_parser("wext", help="work extraction scalar")
    _add_common(p_wext)
    p_wext.set_defaults(func=cmd_wext)

    p_engine = sub.add_parser("engine", help="engine/refrigerator report")
    _add_common(p_engine)
    p_engine.set_defaults(func=cmd_engine)

    p_sweep = sub.add_parser("sweep", help="2-D parameter sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--sweep-x", choices=sweepmod.SWEEP_PARAMETERS)
    p_sweep.add_argument("--sweep-y", choices=sweepmod.SWEEP_PARAMETERS)
    p_sweep.add_argument("--x-range", help="low,high")
    p_sweep.add_argument("--y-range", help="low,high")
    p_sweep.add_argument("--x-scale", choices=["linear", "log"])
    p_sweep.add_argument("--y-scale", choices=["linear", "log"])
    p_sweep.add_argument("--nx", type=int)
    p_sweep.add_argument("--ny", type=int)
    p_sweep.add_argument("--quantity", choices=sorted(_QUANTITIES))
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the acceptance checks")
    p_verify.add_argument("--verbose", action="store_true",
                          help="print per-check numeric details")
    p_verify.add_argument("--checks", nargs="*",
                          help="subset of check names to run")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(getattr(args, "config", None))
        return args.func(args, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, workstats.ConstraintError,
            workstats.PerturbativeBreakdownError, workstats.InversionError,
            sweepmod.SweepError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
