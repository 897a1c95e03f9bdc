"""Command-line front end emitting reproducible CSV/JSON plot data.

Subcommands: trajectory | moore | density | energy | phase-diagram |
verify | coefficients.  Every output embeds the resolved model (or scan
config) as JSON in '#' header lines, floats carry 17 significant
digits, and identical invocations produce byte-identical files.

Exit codes: 0 success, 1 verification or runtime failure, 2 invalid
input.
"""
import json
import math
import sys

import numpy as np

from . import catalog, oracle, stability
from .moore import MooreEvaluator
from .observables import Observables, QuadratureError


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _write_text(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit(path, fmt: str, header_label: str, header_obj: dict,
          names: list[str], units: list[str], columns: list) -> None:
    if fmt == "json":
        payload = {
            header_label: header_obj,
            "units": dict(zip(names, units)),
            "data": {
                name: [v if isinstance(v, str) else
                       (int(v) if isinstance(v, (int, np.integer)) else float(v))
                       for v in col]
                for name, col in zip(names, columns)
            },
        }
        _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return
    lines = [
        f"# {header_label}: {json.dumps(header_obj, sort_keys=True)}",
        f"# columns: {','.join(names)}",
        f"# units: {','.join(units)}",
    ]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def _model_from_args(args) -> catalog.CavityModel:
    if getattr(args, "model", None):
        with open(args.model) as fh:
            return catalog.model_from_dict(json.load(fh))
    fam = getattr(args, "family", None)
    if fam is None:
        raise ValueError("no model given: pass --family or --model")
    theta = args.theta
    if getattr(args, "theta_deg", None) is not None:
        theta = math.radians(args.theta_deg)
    T = args.period
    if fam in ("linear-finite", "linear-odd", "inversion"):
        if theta is None:
            raise ValueError(f"family '{fam}' needs --theta (or --theta-deg)")
        maker = {
            "linear-finite": catalog.make_linear_finite,
            "linear-odd": catalog.make_linear_odd,
            "inversion": catalog.make_inversion,
        }[fam]
        return maker(args.M, theta, T)
    if fam == "homographic":
        if args.v0 is None or args.v1 is None:
            raise ValueError("family 'homographic' needs --v0 and --v1")
        return catalog.make_homographic(args.M, args.v0, args.v1, T)
    if fam == "static":
        return catalog.make_static(args.M, T)
    raise ValueError(f"unknown family '{fam}'")


def _grid(args, default_end: float, start: float | None = None) -> np.ndarray:
    t0 = args.t0 if args.t0 is not None else (start if start is not None else 0.0)
    t1 = args.t1 if args.t1 is not None else default_end
    if args.samples < 2:
        raise ValueError("parameter out of range: need --samples >= 2")
    if not t1 > t0:
        raise ValueError("parameter out of range: need --t1 > --t0")
    return np.linspace(t0, t1, args.samples)


def cmd_trajectory(args) -> int:
    model = _model_from_args(args)
    ev = MooreEvaluator(model)
    t = _grid(args, 10.0 * model.T)
    _emit(args.out, args.format, "model", catalog.model_to_dict(model),
          ["t", "L", "Ldot"], ["time", "length", "dimensionless"],
          [t, ev.trajectory(t), ev.wall_velocity(t)])
    return 0


def cmd_moore(args) -> int:
    model = _model_from_args(args)
    ev = MooreEvaluator(model)
    tau = _grid(args, 20.0 * model.T)
    _emit(args.out, args.format, "model", catalog.model_to_dict(model),
          ["tau", "R", "n"], ["time", "length", "count"],
          [tau, ev.moore_eval(tau), ev.map_index(tau)])
    return 0


def cmd_density(args) -> int:
    model = _model_from_args(args)
    obs = Observables(model)
    ts = args.t1 if args.t1 is not None else 40.0 * model.T
    if args.samples < 2:
        raise ValueError("parameter out of range: need --samples >= 2")
    x = np.linspace(0.0, obs.ev.trajectory(ts), args.samples)
    dens = obs.energy_density_2d(ts, x)
    head = catalog.model_to_dict(model)
    head["t"] = float(ts)
    _emit(args.out, args.format, "model", head,
          ["x", "T00", "T00_over_rho0"],
          ["length", "1/length^2", "dimensionless"],
          [x, dens, dens / obs.rho0])
    return 0


def cmd_energy(args) -> int:
    model = _model_from_args(args)
    obs = Observables(model)
    t = _grid(args, 20.0 * model.T)
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    if not methods:
        raise ValueError("no energy method given")
    names, units, cols = ["t"], ["time"], [t]
    for meth in methods:
        series = obs.energy_series(t, method=meth, rel_tol=args.rel_tol)
        names.append(f"E_{meth}")
        units.append("1/length")
        cols.append(series.energy)
    _emit(args.out, args.format, "model", catalog.model_to_dict(model),
          names, units, cols)
    return 0


def _sibling(path: str, suffix: str) -> str:
    stem, dot, ext = path.rpartition(".")
    if not dot:
        return path + suffix
    return f"{stem}{suffix}.{ext}"


def cmd_phase_diagram(args) -> int:
    if args.out is None:
        raise ValueError("phase-diagram writes multiple files: pass --out")
    omega = tuple(args.omega_range)
    amp = tuple(args.amp_range)
    grid = tuple(args.grid)
    config = {"omega_range": list(omega), "amplitude_range": list(amp),
              "grid": list(grid)}
    points = stability.phase_diagram_scan(omega, amp, grid)
    _emit(args.out, args.format, "config", config,
          ["omega_ratio", "amplitude_ratio", "verdict"],
          ["dimensionless", "dimensionless", "category"],
          [[p.omega_ratio for p in points],
           [p.amplitude_ratio for p in points],
           [p.verdict.value for p in points]])
    xs = np.linspace(max(omega[0], 1e-6), omega[1], max(args.samples, 2))
    curve = [stability.amplitude_frequency_curve(float(x)) for x in xs]
    _emit(_sibling(args.out, "_curve"), args.format, "config", config,
          ["omega_ratio", "amplitude_ratio"],
          ["dimensionless", "dimensionless"], [xs, curve])
    thr = [stability.instability_threshold(float(x)) for x in xs]
    cap = [stability.max_amplitude(float(x)) for x in xs]
    _emit(_sibling(args.out, "_bounds"), args.format, "config", config,
          ["omega_ratio", "threshold", "max_amplitude"],
          ["dimensionless", "dimensionless", "dimensionless"],
          [xs, thr, cap])
    return 0


def cmd_verify(args) -> int:
    model = _model_from_args(args)
    t_max = args.t1 if args.t1 is not None else 50.0 * model.T
    report = oracle.verify_model(model, t_max=t_max, samples=args.samples,
                                 seed=args.seed)
    _write_text(args.out, report.to_json() + "\n")
    return 0 if report.passed else 1


def cmd_coefficients(args) -> int:
    from .observables import coefficient_table

    rows = coefficient_table(args.M)
    _emit(args.out, args.format, "config", {"M_max": args.M},
          ["M", "quantum", "classical", "sum"],
          ["count", "pi*tan(theta)^2/(12L)", "pi*tan(theta)^2/(12L)",
           "pi*tan(theta)^2/(12L)"],
          [[r[0] for r in rows], [r[1] for r in rows],
           [r[2] for r in rows], [r[3] for r in rows]])
    return 0


_COMMANDS = {
    "trajectory": cmd_trajectory,
    "moore": cmd_moore,
    "density": cmd_density,
    "energy": cmd_energy,
    "phase-diagram": cmd_phase_diagram,
    "verify": cmd_verify,
    "coefficients": cmd_coefficients,
}


def get_args(argv=None):
    from argparse import ArgumentParser

    parser = ArgumentParser(prog="vibcav",
                            description="exact vibrating-cavity solutions: "
                                        "trajectories, Moore functions, "
                                        "densities, energies, stability")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(p):
        p.add_argument("--family", choices=["linear-finite", "linear-odd",
                                            "inversion", "homographic",
                                            "static"])
        p.add_argument("--M", type=int, default=1)
        p.add_argument("--theta", type=float)
        p.add_argument("--theta-deg", dest="theta_deg", type=float)
        p.add_argument("--v0", type=float)
        p.add_argument("--v1", type=float)
        p.add_argument("--period", type=float, default=math.pi)
        p.add_argument("--model", help="path to a model JSON file")

    def io_flags(p):
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--samples", type=int, default=1000)
        p.add_argument("--t0", type=float)
        p.add_argument("--t1", type=float)
        p.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)

    for name, help_text in [
        ("trajectory", "wall position and velocity over time"),
        ("moore", "phase function R and region index over tau"),
        ("density", "energy density snapshot across the cavity at t = --t1"),
        ("energy", "total energy E(t); --method picks the evaluators"),
        ("verify", "cross-check closed forms against the numeric solver"),
    ]:
        p = sub.add_parser(name, help=help_text)
        model_flags(p)
        io_flags(p)
    sub.choices["energy"].add_argument(
        "--method", default="quadrature",
        help="comma list from quadrature,closed,asymptotic,classical")

    p = sub.add_parser("phase-diagram",
                       help="stability verdict grid plus boundary curves")
    io_flags(p)
    p.add_argument("--omega-range", dest="omega_range", type=float, nargs=2,
                   default=[1.0, 5.5])
    p.add_argument("--amp-range", dest="amp_range", type=float, nargs=2,
                   default=[0.0, 1.0])
    p.add_argument("--grid", type=int, nargs=2, default=[90, 50])

    p = sub.add_parser("coefficients",
                       help="quantum/classical growth coefficients vs M")
    p.add_argument("--M", type=int, default=8)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = get_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
