"""Command-line entry point: ``uavsim analyze | simulate | metrics``.

Exit codes: 0 success, 1 invalid input, 2 scenario fault.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from ..airframe import GRAVITY, PRESETS, preset
from ..analysis import (DidNotRise, cross_section, force_set, moment_set, omni_acceleration_radius,
                        step_metrics, write_off, write_polygon_csv)
from ..errors import CapacityError, ConfigError
from .config import parse_airframe, parse_config
from .simulate import SUMMARY_WINDOW_S, SimLog, run_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAULT = 2


def _parse_slice(text: str):
    try:
        normal, offset = text.split("/")
        n = np.array([float(x) for x in normal.split(",")])
        if n.shape != (3,) or np.linalg.norm(n) == 0:
            raise ValueError
        return n / np.linalg.norm(n), float(offset)
    except ValueError:
        raise argparse.ArgumentTypeError(f"slice must look like 'nx,ny,nz/offset', got {text!r}") from None


def _load_airframe(arg: str):
    path = Path(arg)
    if path.is_file():
        return parse_airframe(path.read_text())
    if arg in PRESETS:
        return preset(arg)
    raise ConfigError(f"{arg!r} is neither a file nor a preset ({', '.join(sorted(PRESETS))})")


def cmd_analyze(args) -> int:
    model = _load_airframe(args.airframe)
    forces = force_set(model)
    moments = moment_set(model)
    radius, accel = omni_acceleration_radius(model, forces=forces)
    verdict = "fully actuated" if model.fully_actuated else "underactuated"
    print(f"rank {model.rank}, {verdict}, omni radius {radius:.3f}")
    print(f"force set: dimension {forces.dimension}, {len(forces.vertices)} vertices")
    print(f"moment set: dimension {moments.dimension}, {len(moments.vertices)} vertices")
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_off(forces, out / "force_set.off")
        write_off(moments, out / "moment_set.off")
        write_off(accel, out / "acceleration_set.off")
    if args.slice:
        slices = [(args.slice_set, n, b) for n, b in args.slice]
    elif out is not None:
        # hover slice of the force set, axis slices of the acceleration set
        slices = [("force", np.array([0.0, 0.0, 1.0]), model.mass * GRAVITY)]
        slices += [("acceleration", e, 0.0) for e in np.eye(3)]
    else:
        slices = []
    sets = {"force": forces, "acceleration": accel, "moment": moments}
    for i, (which, n, b) in enumerate(slices):
        poly = cross_section(sets[which], n, b)
        name = f"{which}_section_{i}.csv"
        if out is not None:
            write_polygon_csv(poly, out / name)
        print(f"{name}: normal {n.tolist()} offset {b:g}, {len(poly.points)} vertices, area {poly.area:.6g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = parse_config(Path(args.scenario).read_text())
    log = run_scenario(config)
    if args.out:
        log.to_csv(args.out)
    s = log.summary()
    print(f"final position error {s['final_position_error_m']:.6f} m")
    print(f"mean contact force {s['mean_contact_force_N']:.3f} N (final {SUMMARY_WINDOW_S:g} s)")
    print(f"saturation count {s['saturation_count']}")
    if log.fault is not None:
        print(f"fault: {log.fault['kind']} at t = {log.fault['time']:.3f} s: {log.fault['message']}",
              file=sys.stderr)
        return EXIT_FAULT
    return EXIT_OK


def cmd_metrics(args) -> int:
    log = SimLog.from_csv(args.log)
    t = log.column("time")
    y = log.column(args.column)
    initial = float(y[0]) if args.initial is None else args.initial
    m = step_metrics(t, y, args.setpoint, initial)

    def fmt(v):
        return "inf" if math.isinf(v) else f"{v:.6g}"

    print(f"rise time {fmt(m.rise_time_s)} s")
    print(f"settling time {fmt(m.settling_time_s)} s")
    print(f"overshoot {m.overshoot_percent:.3f} %")
    print(f"steady-state error {fmt(m.steady_state_error)}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input, not scenario faults
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uavsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="actuation rank, wrench sets and omni-directional radius")
    p.add_argument("airframe", help="airframe YAML file or preset name")
    p.add_argument("--slice", type=_parse_slice, action="append",
                   help="cross-section plane 'nx,ny,nz/offset' (repeatable)")
    p.add_argument("--slice-set", choices=("force", "moment", "acceleration"), default="force",
                   help="polytope that --slice planes cut (default: force)")
    p.add_argument("--out", help="directory for OFF meshes and cross-section CSVs")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run a scenario file")
    p.add_argument("scenario")
    p.add_argument("--out", help="write the log CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", help="step-response metrics of one log column")
    p.add_argument("log")
    p.add_argument("--column", required=True)
    p.add_argument("--setpoint", type=float, required=True)
    p.add_argument("--initial", type=float, help="pre-step value (default: first sample)")
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CapacityError, DidNotRise, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INVALID


cli = main

if __name__ == "__main__":
    sys.exit(main())
