"""Batch command line front-end.

Every experiment is a subcommand writing CSV/JSON artifacts into ``--out``.
A TOML config file may supply any flag, top-level or under a table named
after the subcommand; explicit flags win.  Exit codes: 0 success, 2 bad
input, 3 certification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .decay_fit import DecaySample, DecaySeries, fit_power_law
from .dnls import evolve_dnls
from .errors import CertificationFailedError, HexlatError
from .newton_poly import TaylorSupport, build_polyhedron, varchenko_bound
from .oscillatory import decay_series, velocity_grid
from .phase_geometry import (
    CURVES,
    certify_appendix,
    classification_sweep,
    classify_singularity,
    find_critical_points,
    trace_curve,
)
from .propagator import WaveField, kernel_fft, min_box_size
from .symbols import symbol_for

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("hexlat")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CERTIFICATION = 3
RNG_NAME = "numpy.random.PCG64"


def parse_time_grid(text) -> list[float]:
    """``"a:b:logK"`` (K log-spaced), ``"a:b:step"``, ``"a,b,c"`` or a single number."""
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        return [float(t) for t in text]
    text = str(text).strip()
    if ":" not in text:
        return [float(t) for t in text.split(",") if t]
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"bad time grid {text!r}")
    a, b = float(parts[0]), float(parts[1])
    spec = parts[2].strip()
    if spec.startswith("log"):
        k = int(spec[3:])
        if k < 2 or a <= 0:
            raise ValueError(f"bad log grid {text!r}")
        return [float(t) for t in np.geomspace(a, b, k)]
    step = float(spec)
    if step <= 0:
        raise ValueError(f"bad step in {text!r}")
    n = int(math.floor((b - a) / step + 1e-9))
    return [a + i * step for i in range(n + 1)]


def _pair(text) -> tuple[float, float]:
    if isinstance(text, (list, tuple)):
        return float(text[0]), float(text[1])
    a, b = str(text).split(",")
    return float(a), float(b)


def _window(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return float(text[0]), float(text[1])
    a, b = str(text).split(":")
    return float(a), float(b)


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serialisable: {type(obj)}")


def write_json(path: Path, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
    path.write_text(text + "\n")


def _meta(args, **extra) -> dict:
    meta = {"hexlat_version": __version__, "command": args.command, "rng": RNG_NAME, "seed": args.seed}
    meta.update(extra)
    return meta


def _mapper(threads: int):
    if threads <= 1:
        return map, None
    pool = ThreadPoolExecutor(max_workers=threads)
    return pool.map, pool


# ---------------------------------------------------------------------------
# subcommands


def cmd_kernel(args) -> int:
    sym = symbol_for(args.lattice)
    n = args.n or min_box_size(args.t)
    k = kernel_fft(sym, n, args.t, workers=args.threads)
    field = WaveField(n, k.array)
    field.to_csv(args.out / "kernel.csv", threshold=args.threshold)
    if args.binary:
        field.dump(args.out / "kernel.bin")
    sup, where = k.sup()
    write_json(
        args.out / "kernel.json",
        {"lattice": sym.lattice.value, "t": args.t, "n": n, "sup_abs": sup, "argmax": list(where),
         "l2_mass": k.total_mass(), "meta": _meta(args)},
    )
    return EXIT_OK


def cmd_decay(args) -> int:
    sym = symbol_for(args.lattice)
    times = parse_time_grid(args.t)
    vel = velocity_grid(args.vgrid)
    series = decay_series(
        sym, times, vel, fft_budget=args.fft_budget, threads=args.threads,
        velocity_descriptor=f"uniform {args.vgrid}x{args.vgrid} grid in B(0, 4*sqrt(2)+1)",
    )
    series.to_csv(args.out / "decay.csv")
    window = _window(args.window) or (times[0], times[-1])
    fit = fit_power_law(series, window, args.method)
    write_json(args.out / "fit.json", {**fit.to_dict(), "lattice": sym.lattice.value, "meta": _meta(args)})
    log.info("slope %.4f r2 %.4f", fit.slope, fit.r_squared)
    return EXIT_OK


def read_decay_csv(path) -> DecaySeries:
    import csv

    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    samples = [
        DecaySample(float(r["t"]), float(r["sup_abs"]), (int(r["argmax_l1"]), int(r["argmax_l2"])), r["backend"])
        for r in rows
    ]
    return DecaySeries(samples, velocity_sampling=f"from {Path(path).name}")


def cmd_fit(args) -> int:
    series = read_decay_csv(args.input)
    fit = fit_power_law(series, _window(args.window), args.method)
    write_json(args.out / "fit.json", {**fit.to_dict(), "meta": _meta(args)})
    return EXIT_OK


def cmd_phase(args) -> int:
    mapper, pool = _mapper(args.threads)
    try:
        if args.sweep:
            res = classification_sweep(args.sweep, seed=args.seed, grid_seeds=args.seeds, map_fn=mapper)
            payload = res.to_dict()
            payload["reports"] = [r.to_dict() for r in res.reports]
            payload["meta"] = _meta(args)
            write_json(args.out / "sweep.json", payload)
            return EXIT_OK if not res.unclassified else EXIT_CERTIFICATION
        v = _pair(args.v)
        points = find_critical_points(v, args.seeds)
        reports = [classify_singularity(p.x, v).to_dict() for p in points]
        write_json(args.out / "phase.json", {"v": list(v), "reports": reports, "meta": _meta(args)})
        return EXIT_OK
    finally:
        if pool is not None:
            pool.shutdown()


def cmd_curves(args) -> int:
    labels = list(CURVES) if args.label == "all" else [args.label]
    summary = {}
    for label in labels:
        cs = trace_curve(label, args.grid)
        cs.to_csv(args.out / f"curve_{label}.csv")
        summary[label] = {"n_points": int(len(cs.points)),
                          "max_residual": float(cs.residuals.max()) if len(cs.residuals) else 0.0}
    write_json(args.out / "curves.json", {"grid_n": args.grid, "curves": summary, "meta": _meta(args)})
    return EXIT_OK


def cmd_certify(args) -> int:
    try:
        report = certify_appendix(args.grid, args.eps)
        code = EXIT_OK
    except CertificationFailedError as exc:
        report = exc.report
        code = EXIT_CERTIFICATION
        log.error("%s", exc)
    write_json(args.out / "certify.json", {**report.to_dict(), "meta": _meta(args)})
    return code


def cmd_newton(args) -> int:
    support = TaylorSupport.parse(args.support)
    poly = build_polyhedron(support)
    beta, p = varchenko_bound(poly)
    payload = poly.to_dict()
    payload.update({"support": [list(e) for e in support.exponents], "distance": str(poly.distance),
                    "bound": [str(beta), p], "meta": _meta(args)})
    write_json(args.out / "newton.json", payload)
    return EXIT_OK


def cmd_dnls(args) -> int:
    sym = symbol_for(args.lattice)
    n = args.n or min_box_size(args.T)
    psi = WaveField.delta(n, args.eps)
    traj = evolve_dnls(psi, sym, args.T, args.dt, args.sigma, snapshot_every=args.snapshot,
                       keep_fields=False, workers=args.threads)
    traj.to_csv(args.out / "dnls.csv")
    d0, d1 = traj.diagnostics[0], traj.diagnostics[-1]
    write_json(
        args.out / "dnls.json",
        {"n": n, "eps": args.eps, "sigma": args.sigma, "T": args.T, "dt": args.dt,
         "mass_drift": abs(d1.mass - d0.mass) / d0.mass, "final_linf": d1.linf,
         "strichartz_L4l6": d1.strichartz_partial, "meta": _meta(args)},
    )
    return EXIT_OK


def cmd_report(args) -> int:
    parts = {}
    for path in sorted(args.out.glob("*.json")):
        if path.name == "report.json":
            continue
        data = json.loads(path.read_text())
        data.pop("reports", None)
        data.pop("hits", None)
        parts[path.stem] = data
    write_json(args.out / "report.json", {"artifacts": parts, "meta": _meta(args)})
    return EXIT_OK


COMMANDS = {
    "kernel": cmd_kernel,
    "decay": cmd_decay,
    "fit": cmd_fit,
    "phase": cmd_phase,
    "curves": cmd_curves,
    "certify": cmd_certify,
    "newton": cmd_newton,
    "dnls": cmd_dnls,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--config", type=Path, default=None, help="TOML config file")
    common.add_argument("--threads", type=int, default=int(os.environ.get("HEXLAT_THREADS", "1")))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hexlat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", parents=[common], help="lattice kernel K(l, t) by FFT")
    p.add_argument("--lattice", default="hex")
    p.add_argument("--t", type=float, default=10.0)
    p.add_argument("--n", type=int, default=None, help="box side (default: min_box_size(t))")
    p.add_argument("--threshold", type=float, default=1e-14, help="skip sites with |K| <= threshold")
    p.add_argument("--binary", action="store_true", help="also write a binary dump")

    p = sub.add_parser("decay", parents=[common], help="sup-norm decay series and power-law fit")
    p.add_argument("--lattice", default="hex")
    p.add_argument("--t", default="20:200:log16")
    p.add_argument("--vgrid", type=int, default=41)
    p.add_argument("--fft-budget", type=int, default=4096)
    p.add_argument("--window", default=None, help="fit window a:b")
    p.add_argument("--method", default="dyadic_envelope", choices=["direct", "dyadic_envelope"])

    p = sub.add_parser("fit", parents=[common], help="power-law fit of a decay CSV")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--window", default=None)
    p.add_argument("--method", default="dyadic_envelope", choices=["direct", "dyadic_envelope"])

    p = sub.add_parser("phase", parents=[common], help="critical points and singularity classes")
    p.add_argument("--v", default="0,0", help="velocity v1,v2")
    p.add_argument("--seeds", type=int, default=32)
    p.add_argument("--sweep", type=int, default=0, help="run an n-velocity classification sweep")

    p = sub.add_parser("curves", parents=[common], help="zero sets of the degeneracy curves")
    p.add_argument("--label", default="all", choices=["all", *CURVES])
    p.add_argument("--grid", type=int, default=512)

    p = sub.add_parser("certify", parents=[common], help="curve-intersection certification")
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--eps", type=float, default=1e-3)

    p = sub.add_parser("newton", parents=[common], help="Newton polyhedron and exponent bound")
    p.add_argument("--support", default="2,0;1,2;0,4")

    p = sub.add_parser("dnls", parents=[common], help="small-data DNLS evolution")
    p.add_argument("--lattice", default="hex")
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--T", type=float, default=50.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--snapshot", type=float, default=1.0)
    p.add_argument("--n", type=int, default=None)

    sub.add_parser("report", parents=[common], help="collect JSON artifacts into report.json")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path, default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return
    with open(known.config, "rb") as fh:
        cfg = tomllib.load(fh)
    command = next((a for a in argv if a in COMMANDS), None)
    top = {k.replace("-", "_"): v for k, v in cfg.items() if not isinstance(v, dict)}
    table = cfg.get(command, {}) if command else {}
    values = {**top, **{k.replace("-", "_"): v for k, v in table.items()}}
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    if command:
        sp = subparsers.choices[command]
        valid = {a.dest for a in sp._actions}
        unknown = sorted(set(values) - valid)
        if unknown:
            sp.error(f"unknown config keys: {', '.join(unknown)}")
        if "out" in values:
            values["out"] = Path(values["out"])
        sp.set_defaults(**values)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    except (OSError, tomllib.TOMLDecodeError) as exc:
        print(f"hexlat: config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.threads = max(1, args.threads)
    args.out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](args)
    except (HexlatError, ValueError, KeyError) as exc:
        print(f"hexlat {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
