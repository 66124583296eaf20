"""Command-line front end: sweeps, steady states, trajectories, checks.

Subcommands
-----------
sweep-transmission  classical R/T curve plus the quantum emission ratios
steady              stationary photon numbers and emission rates
evolve              time evolution of any of the four models
consistency         the full cross-model check suite

Options may come from a JSON config file (--config, a flat object keyed by
long option names); command-line flags override config values.  Numeric
output uses 17 significant digits in CSV/text and round-trip float repr in
JSON, so identical configs give byte-identical files.

Exit codes: 0 success / all checks pass, 1 usage error, 2 numerical
failure, 3 consistency failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .classical import CavityGeometry, cavity_rates
from .consistency import default_suite, format_text, reports_to_json
from .lindblad import build_space, evolve_density, expectation_columns, suggested_cutoff, traveling_generator
from .numerics import IntegrationError
from .parameters import (TravelingWaveParams, coupling_exact,
                         coupling_near_resonant, kappa_exact, nearest_detuning)
from .rates import (evolve, reduced_total_system, single_mode_system,
                    steady_emission_split, traveling_steady_state,
                    traveling_system)

SI_LIGHT_SPEED = 299792458.0
EVOLVE_COLUMNS = ("t", "n_L", "n_R", "k1", "k2", "k3", "I_L", "I_R", "I_tot")


class CliError(Exception):
    """Bad usage or configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _build_parser() -> _Parser:
    parser = _Parser(prog="twocav", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"),
                        help="tabular output format (default csv)")
    parser.add_argument("--units", choices=("natural", "si"),
                        help="natural: c=1 and transit time nd/c=1 "
                             "(geometry from --n alone); si: supply --d, "
                             "--n and optionally --c")
    parser.add_argument("--seed", type=int, help="seed for fuzz grids only")
    sub = parser.add_subparsers(dest="command", required=True)

    geom_opts = argparse.ArgumentParser(add_help=False)
    geom_opts.add_argument("--n", type=float, help="refractive index (>= 1)")
    geom_opts.add_argument("--d", type=float, help="cavity length (si units)")
    geom_opts.add_argument("--c", type=float, help="light speed (si units)")

    drive_opts = argparse.ArgumentParser(add_help=False)
    drive_opts.add_argument("--kappa", type=float, help="decay rate override")
    drive_opts.add_argument("--coupling", type=float,
                            help="coupling rate J override")
    drive_opts.add_argument("--rabi", type=float, help="drive strength")
    drive_opts.add_argument("--omega0", type=float,
                            help="drive frequency (geometry mode)")

    sweep = sub.add_parser("sweep-transmission", parents=[geom_opts],
                           help="R_cav/T_cav and emission ratios over phase")
    sweep.add_argument("--phi-min", type=float, help="first phase (default 0)")
    sweep.add_argument("--phi-max", type=float,
                       help="last phase (default 2*pi)")
    sweep.add_argument("--points", type=int, help="grid size (default 1000)")

    steady = sub.add_parser("steady", parents=[geom_opts, drive_opts],
                            help="stationary state report")
    steady.add_argument("--sweep-delta", nargs=3, metavar=("MIN", "MAX", "POINTS"),
                        help="emit the Lorentzian I_tot(delta) table instead")

    ev = sub.add_parser("evolve", parents=[geom_opts, drive_opts],
                        help="integrate one model and emit the trajectory")
    ev.add_argument("--model", choices=("traveling5", "single_mode",
                                        "reduced_total", "lindblad"),
                    help="which dynamics to run (default traveling5)")
    ev.add_argument("--delta", type=float,
                    help="detuning (single_mode/reduced_total)")
    ev.add_argument("--t-final", type=float, help="duration (default 10)")
    ev.add_argument("--dt", type=float, help="step (default 0.01/max rate)")
    ev.add_argument("--stride", type=int, help="record every Nth step")
    ev.add_argument("--initial",
                    help="comma-separated initial state; 5 values for "
                         "traveling5, 3 for single_mode/reduced_total "
                         "(single-mode photon number is reported in the "
                         "n_R column)")
    ev.add_argument("--initial-fock",
                    help="lindblad start 'nL,nR' (default vacuum)")
    ev.add_argument("--n-max", type=int, help="Fock cutoff per mode")
    ev.add_argument("--allow-small-cutoff", action="store_true", default=None,
                    help="proceed although --n-max is below the heuristic")

    cons = sub.add_parser("consistency",
                          help="run every cross-model check; exit 3 on failure")
    cons.add_argument("--fault-kappa", type=float,
                      help="multiply kappa by this factor (negative control)")
    cons.add_argument("--fuzz", type=int,
                      help="extra random phases per ratio check")
    return parser


_DEFAULTS = {
    "format": "csv", "units": "natural", "seed": 0,
    "phi_min": 0.0, "phi_max": 2.0 * math.pi, "points": 1000,
    "model": "traveling5", "t_final": 10.0, "stride": 1,
    "fault_kappa": 1.0, "fuzz": 0, "c": SI_LIGHT_SPEED,
}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, then from the defaults."""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}")
        if not isinstance(loaded, dict):
            raise CliError("config must be a JSON object of option names")
        known = vars(args)
        for key, value in loaded.items():
            dest = key.replace("-", "_")
            if dest in ("config", "command"):
                raise CliError(f"config may not set '{key}'")
            if dest not in known:
                raise CliError(f"unknown config key '{key}' for "
                               f"'{args.command}'")
            if known[dest] is None:
                setattr(args, dest, value)
    for key, value in _DEFAULTS.items():
        if getattr(args, key, False) is None:
            setattr(args, key, value)
    return args


def _geometry(args) -> CavityGeometry:
    if args.n is None:
        raise CliError("geometry requires --n")
    try:
        if args.units == "natural":
            if args.d is not None:
                raise CliError("--d is an SI option; natural units fix "
                               "the transit time nd/c = 1")
            # transit time nd/c = 1 exactly
            return CavityGeometry(length=1.0 / float(args.n),
                                  index=float(args.n), light_speed=1.0)
        if args.d is None:
            raise CliError("--units si requires --d (and --n)")
        return CavityGeometry(length=float(args.d), index=float(args.n),
                              light_speed=float(args.c))
    except ValueError as exc:
        raise CliError(str(exc))


def _resolve_params(args, need_detuning: bool = False) -> TravelingWaveParams:
    """One parameter source: direct (kappa, coupling) or geometry+omega0."""
    direct = args.kappa is not None or args.coupling is not None
    geometric = args.omega0 is not None
    if direct and geometric:
        raise CliError("give either --kappa/--coupling or geometry with "
                       "--omega0, not both")
    rabi = float(args.rabi) if args.rabi is not None else 1.0
    try:
        if direct:
            kappa = float(args.kappa) if args.kappa is not None else 1.0
            coupling = float(args.coupling) if args.coupling is not None else 0.0
            detuning = float(getattr(args, "delta", 0.0) or 0.0)
            return TravelingWaveParams(kappa=kappa, coupling=coupling,
                                       rabi=rabi, detuning=detuning)
        if geometric:
            geom = _geometry(args)
            delta, _ = nearest_detuning(geom, float(args.omega0))
            return TravelingWaveParams(kappa=kappa_exact(geom),
                                       coupling=coupling_exact(geom, float(args.omega0)),
                                       rabi=rabi, detuning=delta)
    except ValueError as exc:
        raise CliError(str(exc))
    if need_detuning and getattr(args, "delta", None) is not None:
        return TravelingWaveParams(
            kappa=float(args.kappa) if args.kappa is not None else 1.0,
            coupling=coupling_near_resonant(float(args.delta)),
            rabi=rabi, detuning=float(args.delta))
    raise CliError("no parameter source: give --kappa/--coupling, --delta, "
                   "or geometry with --omega0")


def _emit_table(args, columns, rows) -> None:
    if args.format == "json":
        payload = {"columns": list(columns),
                   "rows": [[float(v) for v in row] for row in rows]}
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    _write(args.out, text)


def _write(path, text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_sweep_transmission(args) -> int:
    geom = _geometry(args)
    points = int(args.points)
    if points < 1:
        raise CliError("--points must be >= 1")
    kappa = kappa_exact(geom)
    phis = np.linspace(float(args.phi_min), float(args.phi_max), points)
    rows = []
    for phi in phis:
        omega0 = phi / geom.transit_time
        scatter = cavity_rates(geom, omega0)
        params = TravelingWaveParams(kappa=kappa,
                                     coupling=coupling_exact(geom, omega0),
                                     rabi=1.0)
        split = steady_emission_split(params)
        rows.append((phi, scatter.R_cav, scatter.T_cav,
                     split.i_left / split.i_total,
                     split.i_right / split.i_total))
    _emit_table(args, ("phi", "R_cav", "T_cav", "ratio_L", "ratio_R"), rows)
    return 0


def _cmd_steady(args) -> int:
    if args.sweep_delta is not None:
        lo, hi, pts = (float(args.sweep_delta[0]), float(args.sweep_delta[1]),
                       int(args.sweep_delta[2]))
        if pts < 1:
            raise CliError("--sweep-delta needs at least one point")
        kappa = float(args.kappa) if args.kappa is not None else 1.0
        rabi = float(args.rabi) if args.rabi is not None else 1.0
        rows = []
        for delta in np.linspace(lo, hi, pts):
            p = TravelingWaveParams(kappa=kappa,
                                    coupling=coupling_near_resonant(delta),
                                    rabi=rabi, detuning=delta)
            split = steady_emission_split(p)
            rows.append((delta, split.i_left, split.i_right, split.i_total))
        _emit_table(args, ("delta", "I_L", "I_R", "I_tot"), rows)
        return 0

    params = _resolve_params(args)
    steady = traveling_steady_state(params)
    split = steady_emission_split(params)
    fields = {
        "n_L": steady.n_l, "n_R": steady.n_r, "k1": steady.k1,
        "k2": steady.k2, "k3": steady.k3, "I_L": split.i_left,
        "I_R": split.i_right, "I_tot": split.i_total,
    }
    width = max(len(k) for k in fields)
    table = "\n".join(f"{k:<{width}}  {_fmt(v)}" for k, v in fields.items())
    sys.stdout.write(table + "\n")
    payload = json.dumps({k: float(v) for k, v in fields.items()},
                         indent=2) + "\n"
    if args.out:
        _write(args.out, payload)
    else:
        sys.stdout.write(payload)
    return 0


def _parse_initial(text, expected: int, label: str) -> np.ndarray:
    if text is None:
        return np.zeros(expected)
    values = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        vec = np.array([float(v) for v in values])
    except ValueError as exc:
        raise CliError(f"bad --{label}: {exc}")
    if vec.size != expected:
        raise CliError(f"--{label} needs {expected} values, got {vec.size}")
    return vec


def _cmd_evolve(args) -> int:
    T = float(args.t_final)
    dt = float(args.dt) if args.dt is not None else None
    stride = int(args.stride)
    model = args.model

    if model == "traveling5":
        params = _resolve_params(args)
        s0 = _parse_initial(args.initial, 5, "initial")
        traj = evolve(traveling_system(params), s0, T, dt,
                      record_stride=stride)
        body = traj.states
        kappa = params.kappa
    elif model in ("single_mode", "reduced_total"):
        params = _resolve_params(args, need_detuning=True)
        s0 = _parse_initial(args.initial, 3, "initial")
        factory = (single_mode_system if model == "single_mode"
                   else reduced_total_system)
        system = factory(params.rabi, params.detuning, params.kappa)
        traj = evolve(system, s0, T, dt, record_stride=stride)
        zeros = np.zeros(len(traj))
        body = np.column_stack([zeros, traj.column(0), traj.column(1),
                                traj.column(2), zeros])
        kappa = params.kappa
    elif model == "lindblad":
        params = _resolve_params(args)
        if args.n_max is None:
            raise CliError("lindblad model requires --n-max")
        n_max = int(args.n_max)
        if params.kappa > 0.0:
            needed = suggested_cutoff(params)
            if n_max < needed and not args.allow_small_cutoff:
                raise CliError(
                    f"--n-max {n_max} is below the suggested cutoff {needed}; "
                    "pass --allow-small-cutoff to proceed")
        space = build_space(n_max, modes=2)
        occ = _parse_initial(args.initial_fock, 2, "initial-fock")
        rho0 = space.fock_density(int(occ[0]), int(occ[1]))
        generator = traveling_generator(space, params.rabi, params.coupling,
                                        params.kappa)
        traj = evolve_density(rho0, generator, T, dt, record_stride=stride)
        body = expectation_columns(traj, space)
        kappa = params.kappa
    else:  # unreachable given argparse choices
        raise CliError(f"unknown model {model}")

    n_l, n_r = body[:, 0], body[:, 1]
    rows = np.column_stack([traj.times, body, kappa * n_l, kappa * n_r,
                            kappa * (n_l + n_r)])
    _emit_table(args, EVOLVE_COLUMNS, rows)
    return 0


def _cmd_consistency(args) -> int:
    reports = default_suite(kappa_scale=float(args.fault_kappa),
                            fuzz=int(args.fuzz), seed=int(args.seed))
    sys.stdout.write(format_text(reports) + "\n")
    payload = json.dumps(reports_to_json(reports), indent=2) + "\n"
    if args.out:
        _write(args.out, payload)
    else:
        sys.stdout.write(payload)
    return 0 if all(r.passed for r in reports) else 3


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = _merge_config(parser.parse_args(argv))
        handler = {
            "sweep-transmission": _cmd_sweep_transmission,
            "steady": _cmd_steady,
            "evolve": _cmd_evolve,
            "consistency": _cmd_consistency,
        }[args.command]
        return handler(args)
    except CliError as exc:
        print(f"twocav: error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationError, ValueError, RuntimeError) as exc:
        print(f"twocav: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
