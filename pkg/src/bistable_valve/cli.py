"""``bvl`` command line: curves, characterisation, sweeps, inverse design and bench runs.

Exit codes: 0 success, 1 usage error, 2 file or directory problem, 3 input
outside the model's domain.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from .bench import (BenchConfig, ValveSimModel, fit_exponential, multiplicative_noise, preset,
                    run_algorithm_1, run_algorithm_2)
from .curves import characterize, pressure_curve, total_energy_curve
from .errors import ModelDomainError
from .explorer import INVERT_PARAMETERS, SWEEP_PARAMETERS, SweepSpec, invert_design, provenance, run_sweep
from .materials import MaterialModel, modulus_for_hardness, resolve_table
from .output import csv_text, json_text, write_text
from .shell import ShellGeometry

EXIT_USAGE, EXIT_IO, EXIT_DOMAIN = 1, 2, 3
RANGE_EPS = 1e-9
DEFAULT_BOUNDS = {"thickness": (0.7, 1.3), "slope_angle": (30.0, 60.0),
                  "shore_hardness": (30.0, 70.0), "youngs_modulus": (0.5, 5.0)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_values(text: str) -> list:
    """``start:stop:step`` (stop included within 1e-9) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if not step > 0 or stop < start:
            raise argparse.ArgumentTypeError(f"need step > 0 and stop >= start in {text!r}")
        n = int(math.floor((stop - start) / step + RANGE_EPS))
        values = [round(start + k * step, 9) for k in range(n + 1)]
        if abs(start + (n + 1) * step - stop) <= RANGE_EPS:
            values.append(round(stop, 9))
        return values
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number list: {text!r}") from None


def parse_bounds(text: str) -> tuple:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bounds must be lo:hi, got {text!r}") from None
    return lo, hi


def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("design and output")
    g.add_argument("--R", type=float, metavar="MM", default=8.0, help="outer ring radius, mm (default 8)")
    g.add_argument("--r", type=float, metavar="MM", default=4.0, help="inner ring radius, mm (default 4)")
    g.add_argument("--t", type=float, metavar="MM", default=1.0, help="shell thickness, mm (default 1)")
    g.add_argument("--alpha", type=float, metavar="DEG", default=45.0, help="slope angle, degrees (default 45)")
    mat = g.add_mutually_exclusive_group()
    mat.add_argument("--shore", type=float, default=None, help="Shore-A hardness (default 50)")
    mat.add_argument("--E", type=float, default=None, help="Young's modulus, MPa")
    g.add_argument("--grid", type=int, default=2001, help="energy grid points, odd (default 2001)")
    g.add_argument("--material-table", default=None,
                   help="hardness table file of shoreA=MPa lines (else $BVL_MATERIAL_TABLE)")
    g.add_argument("--out", default=".", help="existing output directory (default .)")
    g.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    g.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    g.add_argument("--jobs", type=int, default=1, help="parallel worker processes (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bvl", allow_abbrev=False,
                     description="Bistable soft-valve model and virtual test bench.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    parser.commands = {}

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, allow_abbrev=False)
        _common(p)
        parser.commands[name] = p
        return p

    add("curve", "write U(h) and p(h) curves and a JSON summary")
    add("characterize", "stable states and critical pressure of one design")

    p = add("sweep", "critical pressure over a parameter sweep")
    p.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    p.add_argument("--values", required=True, type=parse_values,
                   help="start:stop:step (inclusive) or comma list")

    p = add("invert", "parameter value that reaches a target critical pressure")
    p.add_argument("--target", required=True, type=float, help="target critical pressure, kPa")
    p.add_argument("--param", required=True, choices=INVERT_PARAMETERS)
    p.add_argument("--bounds", type=parse_bounds, default=None, help="lo:hi search interval")

    p = add("simulate", "stepwise critical-pressure search on the virtual bench")
    p.add_argument("--pc", type=float, default=None,
                   help="valve critical pressure, kPa (default: model prediction for the design)")
    p.add_argument("--dp", type=float, default=1.0, help="pressure step, kPa (default 1)")
    p.add_argument("--start", type=float, default=1.0, help="first trial pressure, kPa (default 1)")
    p.add_argument("--response-time", type=float, default=1.0, help="valve response time, s")
    p.add_argument("--sample-rate", type=float, default=None, help="bench sample rate, Hz (>= 1000)")
    p.add_argument("--direction", choices=("forward", "reverse"), default=None,
                   help="switching direction (default: drawn from --seed)")
    p.add_argument("--max-trials", type=int, default=200)
    p.add_argument("--config", default=None,
                   help="scenario file of key=value settings (valve, run and bench)")
    p.add_argument("--no-log", action="store_true", help="skip the per-sample log file")

    p = add("fatigue", "repeated switching with a support-removal preset")
    p.add_argument("--preset", required=True, choices=("chemical", "physical"))
    p.add_argument("--cycles", type=int, default=500)
    p.add_argument("--pressure", type=float, default=35.0, help="driving pressure, kPa (default 35)")
    p.add_argument("--pc", type=float, default=None, help="override the preset critical pressure, kPa")
    p.add_argument("--noise", type=float, default=0.0,
                   help="multiplicative noise level applied to the series before fitting")
    p.add_argument("--sample-rate", type=float, default=None, help="bench sample rate, Hz (>= 1000)")
    p.add_argument("--config", default=None,
                   help="scenario file of key=value settings (run and bench)")
    return parser


def _design(args):
    geom = ShellGeometry(args.R, args.r, args.t, args.alpha)
    table = resolve_table(args.material_table)
    if args.E is not None:
        mat = MaterialModel(args.E)
    else:
        mat = modulus_for_hardness(50.0 if args.shore is None else args.shore, table)
    return geom, mat, table


def _outdir(args) -> Path:
    out = Path(args.out)
    if not out.is_dir():
        raise FileNotFoundError(f"output directory {str(out)!r} does not exist")
    return out


# scenario-file keys that set subcommand options; the rest are bench settings
SCENARIO_KEYS = {"pc": float, "response_time": float, "degradation_a": float,
                 "degradation_b": float, "leak_threshold": int, "dp": float, "start": float,
                 "seed": int, "sample_rate": float, "direction": str, "max_trials": int,
                 "cycles": int, "pressure": float, "noise": float}


def read_scenario(path) -> tuple:
    """Split a ``key=value`` scenario file into (option defaults, bench settings)."""
    bench_fields = {f.name for f in dataclasses.fields(BenchConfig)} - {"sample_rate"}
    options, bench = {}, {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        try:
            if sep and key in SCENARIO_KEYS:
                options[key] = SCENARIO_KEYS[key](value)
            elif sep and key in bench_fields:
                bench[key] = int(value) if key == "hold_samples" else float(value)
            else:
                raise UsageError(f"{path}:{lineno}: unknown setting {raw!r}; expected one of "
                                 f"{sorted(set(SCENARIO_KEYS) | bench_fields)}")
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value in {raw!r}") from None
    return options, bench


def _bench_config(args) -> BenchConfig:
    settings = dict(getattr(args, "bench_settings", {}))
    if args.sample_rate is not None:
        settings["sample_rate"] = args.sample_rate
    return BenchConfig(**settings)


def _valve(args, pc) -> ValveSimModel:
    a, b = getattr(args, "degradation_a", None), getattr(args, "degradation_b", None)
    degradation = (a, b) if a is not None and b is not None else None
    return ValveSimModel(pc, args.response_time, degradation,
                         leak_threshold=getattr(args, "leak_threshold", None))


def _summary(geom, mat, table, grid_n, ch) -> dict:
    return {"bistable": ch.bistable, "stable_states_mm": list(ch.stable_states),
            "P_c_kPa": ch.critical_pressure, "snap_height_mm": ch.snap_height,
            "provenance": provenance(geom, mat, table, grid_n)}


def cmd_curve(args) -> list:
    out = _outdir(args)
    geom, mat, table = _design(args)
    curve = total_energy_curve(geom, mat, args.grid)
    pc = pressure_curve(curve)
    ch = characterize(geom, mat, args.grid)
    return [write_text(out / "energy.csv", csv_text(("h_mm", "U_mJ"), zip(curve.h, curve.energy))),
            write_text(out / "pressure.csv", csv_text(("h_mm", "p_kPa"), zip(pc.h, pc.pressure))),
            write_text(out / "summary.json", json_text(_summary(geom, mat, table, args.grid, ch)))]


def cmd_characterize(args) -> list:
    out = _outdir(args)
    geom, mat, table = _design(args)
    ch = characterize(geom, mat, args.grid)
    if args.format == "json":
        return [write_text(out / "characterize.json", json_text(_summary(geom, mat, table, args.grid, ch)))]
    states = list(ch.stable_states) + [None] * (2 - len(ch.stable_states))
    row = (ch.critical_pressure, ch.bistable, states[0], states[1], ch.snap_height)
    header = ("P_c_kPa", "bistable", "h_lower_mm", "h_upper_mm", "snap_height_mm")
    return [write_text(out / "characterize.csv", csv_text(header, [row]))]


def cmd_sweep(args) -> list:
    out = _outdir(args)
    geom, mat, table = _design(args)
    spec = SweepSpec(args.param, args.values, geom, mat, table, args.grid)
    result = run_sweep(spec, jobs=args.jobs)
    if args.format == "json":
        return [write_text(out / "sweep.json", result.to_json())]
    return [write_text(out / "sweep.csv", result.to_csv())]


def cmd_invert(args) -> list:
    out = _outdir(args)
    geom, mat, table = _design(args)
    bounds = args.bounds or DEFAULT_BOUNDS[args.param]
    res = invert_design(args.target, args.param, bounds, geom, mat, table, args.grid)
    record = {"parameter": res.parameter, "value": res.value, "P_c_kPa": res.critical_pressure,
              "continuous_value": res.continuous_value, "iterations": res.iterations,
              "target_kPa": args.target, "bounds": list(bounds),
              "provenance": provenance(geom, mat, table, args.grid)}
    if args.format == "json":
        return [write_text(out / "invert.json", json_text(record))]
    header = ("param", "value", "P_c_kPa", "continuous_value", "iterations")
    row = (res.parameter, res.value, res.critical_pressure, res.continuous_value, res.iterations)
    return [write_text(out / "invert.csv", csv_text(header, [row]))]


def cmd_simulate(args) -> list:
    out = _outdir(args)
    config = _bench_config(args)
    pc = args.pc
    if pc is None:
        geom, mat, _ = _design(args)
        pc = characterize(geom, mat, args.grid).critical_pressure
        if pc is None:
            raise ModelDomainError("design is monostable; pass --pc to simulate a valve anyway")
    valve = _valve(args, pc)
    res = run_algorithm_1(valve, args.dp, args.start, config, seed=args.seed,
                          max_trials=args.max_trials, record=not args.no_log, direction=args.direction)
    record = {"P_critical_kPa": res.critical_pressure, "valve_P_c_kPa": pc, "dp_kPa": args.dp,
              "start_kPa": args.start, "direction": res.direction, "seed": args.seed,
              "trials": len(res.applied_pressures), "applied_pressures_kPa": res.applied_pressures,
              "response_times_s": res.response_times, "config": dataclasses.asdict(config)}
    written = [write_text(out / "simulate.json", json_text(record))]
    if res.log is not None:
        path = out / "simulate_log.csv"
        res.log.to_csv(path)
        written.append(path)
    return written


def cmd_fatigue(args) -> list:
    out = _outdir(args)
    config = _bench_config(args)
    valve = preset(args.preset, args.pc)
    if getattr(args, "degradation_a", None) is not None and getattr(args, "degradation_b", None) is not None:
        valve.degradation = (args.degradation_a, args.degradation_b)
    if getattr(args, "leak_threshold", None) is not None:
        valve.leak_threshold = args.leak_threshold
    res = run_algorithm_2(valve, args.cycles, args.pressure, config)
    n = np.arange(1, len(res.response_times) + 1)
    series = np.asarray(res.response_times, dtype=float)
    if args.noise > 0:
        series = multiplicative_noise(series, args.noise, args.seed)
    fit = fit_exponential(zip(n, series)) if len(series) >= 10 else None
    record = {"preset": args.preset, "cycles_requested": args.cycles,
              "cycles_completed": res.cycles_completed, "failure_cycle": res.failure_cycle,
              "valve_P_c_kPa": valve.critical_pressure, "drive_pressure_kPa": args.pressure,
              "noise": args.noise, "seed": args.seed,
              "fit": None if fit is None else {"a_s": fit.a, "b_per_cycle": fit.b, "rms_log": fit.rms}}
    rows = zip(n, series, res.measured_response_times)
    return [write_text(out / "fatigue.csv",
                       csv_text(("cycle", "response_time_s", "measured_response_time_s"), rows)),
            write_text(out / "fatigue.json", json_text(record))]


COMMANDS = {"curve": cmd_curve, "characterize": cmd_characterize, "sweep": cmd_sweep,
            "invert": cmd_invert, "simulate": cmd_simulate, "fatigue": cmd_fatigue}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            # scenario values become defaults, so explicit flags still win
            options, bench = read_scenario(args.config)
            parser.commands[args.command].set_defaults(**options)
            args = parser.parse_args(argv)
            args.bench_settings = bench
        if args.grid < 101 or args.grid % 2 == 0:
            raise UsageError(f"--grid must be odd and >= 101, got {args.grid}")
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        written = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"bvl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bvl: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # ModelDomainError and invalid design inputs alike
        print(f"bvl: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
