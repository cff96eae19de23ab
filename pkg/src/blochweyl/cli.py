"""Command-line front end.

Subcommands: bands, check-flux, kernel, fiber-matrix, verify, converge.
Every subcommand also accepts ``--config run.json`` (a RunConfig document);
explicit flags override config values.  Exit codes: 0 success, 1 internal
error, 2 configuration error, 3 numerical gate failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_magnetic_input, load_symbol
from .fiber import DualWindow, build_fiber_matrix
from .magnetic import curl, zero_flux_defect
from .spectra import MomentumPath, bands, truncation_convergence
from .symbols import CutoffProfile
from .torus_kernel import GridSpec, build_kernel, default_kernel_window
from .verify import ACCEPTANCE_SUITES, run_suites

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_GATE = 3


class GateFailure(RuntimeError):
    """A numerical gate rejected the run (exit code 3); the message names it."""


def _parse_vector(text, dimension=None):
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    vec = [float(p) for p in parts]
    if dimension is not None and len(vec) != dimension:
        raise ConfigError(f"expected a {dimension}-vector, got {text!r}")
    return vec


def _parse_waypoints(text):
    return [[float(c) for c in w.split(",") if c.strip()]
            for w in text.split(";") if w.strip()]


def _merge_config(args, task):
    if getattr(args, "config", None):
        cfg = RunConfig.from_file(args.config, task=task)
    else:
        cfg = RunConfig(task=task)
    for name in ("symbol_path", "potential_path", "window_radius", "grid_n", "cutoff_n",
                 "k_keep", "samples_per_segment", "output", "json_output", "seed"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "path", None):
        cfg.path_waypoints = _parse_waypoints(args.path)
    if getattr(args, "xi", None):
        cfg.xi = _parse_vector(args.xi)
    if getattr(args, "windows", None):
        cfg.window_radii = [int(w) for w in args.windows.split(",") if w.strip()]
    return cfg.validate()


def _flux_gate(potential_or_field, kind, tol):
    field = curl(potential_or_field) if kind == "potential" else potential_or_field
    defect = zero_flux_defect(field)
    if defect > tol:
        raise GateFailure(
            f"zero-mean-face flux gate: max face flux {defect:.3e} exceeds {tol:.1e}; "
            f"the field admits no periodic vector potential")
    return defect


def cmd_bands(args):
    cfg = _merge_config(args, "bands")
    symbol = load_symbol(cfg.symbol_path)
    window = DualWindow(cfg.window_radius, symbol.dimension)
    potential = None
    if cfg.potential_path:
        kind, obj = load_magnetic_input(cfg.potential_path)
        _flux_gate(obj, kind, cfg.flux_tol)
        if kind == "field":
            raise ConfigError("bands needs a vector potential, not a bare field: "
                              "supply a potential config")
        potential = obj
    if cfg.path_waypoints:
        path = MomentumPath(tuple(tuple(w) for w in cfg.path_waypoints),
                            cfg.samples_per_segment)
    elif cfg.xi:
        path = np.array([cfg.xi])
    else:
        raise ConfigError("bands needs either path waypoints or a single xi")
    cutoff = CutoffProfile(cfg.cutoff_n) if cfg.cutoff_n else None
    grid = GridSpec(cfg.grid_n, symbol.dimension) if potential is not None else None
    if potential is not None and cutoff is None:
        raise ConfigError("magnetic bands require a cutoff index (--cutoff)")
    structure = bands(symbol, path, window, k_keep=cfg.k_keep, potential=potential,
                      grid=grid, cutoff=cutoff)
    out = cfg.output or "bands.csv"
    structure.to_csv(out)
    structure.meta.update({"symbol": cfg.symbol_path, "potential": cfg.potential_path,
                           "version": __version__})
    if cfg.json_output:
        structure.to_json(cfg.json_output)
    print(f"wrote {out}" + (f" and {cfg.json_output}" if cfg.json_output else ""))
    return EXIT_OK


def cmd_check_flux(args):
    cfg = _merge_config(args, "check-flux")
    if not cfg.potential_path:
        raise ConfigError("check-flux requires --potential (potential or field config)")
    kind, obj = load_magnetic_input(cfg.potential_path)
    defect = _flux_gate(obj, kind, cfg.flux_tol)
    print(f"flux gate passed: max face flux {defect:.3e} <= {cfg.flux_tol:.1e}")
    return EXIT_OK


def cmd_kernel(args):
    cfg = _merge_config(args, "kernel")
    symbol = load_symbol(cfg.symbol_path)
    if not cfg.xi:
        raise ConfigError("kernel requires --xi")
    grid = GridSpec(cfg.grid_n, symbol.dimension)
    cutoff = CutoffProfile(cfg.cutoff_n) if cfg.cutoff_n else None
    radius = cfg.extras.get("kernel_window_radius") or default_kernel_window(
        symbol, cfg.xi, cutoff)
    kern = build_kernel(symbol, cfg.xi, DualWindow(int(radius), symbol.dimension),
                        grid, cutoff=cutoff)
    out = cfg.output or "kernel.npy"
    header = {"symbol": cfg.symbol_path, "version": __version__, **kern.provenance}
    if args.format == "csv":
        _write_complex_csv(out, kern.values)
    else:
        np.save(out, kern.values)
    header_path = cfg.json_output or (str(out) + ".json")
    with open(header_path, "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out} and {header_path}")
    return EXIT_OK


def cmd_fiber_matrix(args):
    cfg = _merge_config(args, "fiber-matrix")
    symbol = load_symbol(cfg.symbol_path)
    if not cfg.xi:
        raise ConfigError("fiber-matrix requires --xi")
    cutoff = CutoffProfile(cfg.cutoff_n) if cfg.cutoff_n else None
    work = symbol.with_cutoff(cutoff) if cutoff else symbol
    window = DualWindow(cfg.window_radius, symbol.dimension)
    mat = build_fiber_matrix(work, cfg.xi, window)
    out = cfg.output or "fiber_matrix.npy"
    if args.format == "csv":
        _write_complex_csv(out, mat.entries)
    else:
        np.save(out, mat.entries)
    print(f"wrote {out} ({window.size} x {window.size}, xi={cfg.xi})")
    return EXIT_OK


def cmd_converge(args):
    cfg = _merge_config(args, "converge")
    symbol = load_symbol(cfg.symbol_path)
    if not cfg.xi:
        raise ConfigError("converge requires --xi")
    radii = cfg.window_radii or [4, 8, 16]
    k = cfg.k_keep or 4
    report = truncation_convergence(symbol, cfg.xi, radii, k)
    out = cfg.output or "convergence.json"
    with open(out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for level in report["levels"]:
        diff = level.get("cauchy_diff")
        msg = f"  radius {level['window_radius']:3d}: " + \
            " ".join(f"{v:.10g}" for v in level["eigenvalues"])
        if diff is not None:
            msg += f"   (cauchy {diff:.2e}{', STALLED' if level.get('stalled') else ''})"
        print(msg)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_verify(args):
    names = None
    if args.suites is not None:
        names = [s.strip() for s in args.suites.split(",") if s.strip()]
        if not names:
            raise ConfigError("empty suite list")
    try:
        reports = run_suites(names, seed=args.seed or 0, flip_sign=args.debug_flip_sign)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    failed = 0
    for rep in reports:
        status = "PASS" if rep["passed"] else "FAIL"
        print(f"[{status}] {rep['name']}: measured {rep['measured']:.3e} "
              f"vs tolerance {rep['tolerance']:.3e} ({rep['runtime_s']}s)")
        failed += 0 if rep["passed"] else 1
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(reports, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.report}")
    if failed:
        print(f"{failed} suite(s) failed")
        return EXIT_GATE
    print(f"all {len(reports)} suites passed")
    return EXIT_OK


def _write_complex_csv(path, matrix):
    """Row, column, real, imaginary; one line per entry, deterministic order."""
    with open(path, "w") as fh:
        fh.write("row,col,re,im\n")
        for i in range(matrix.shape[0]):
            for j in range(matrix.shape[1]):
                v = matrix[i, j]
                fh.write(f"{i},{j},{v.real!r},{v.imag!r}\n")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="blochweyl",
        description="Band structures and fiber operators of periodic Weyl "
                    "pseudo-differential operators")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_symbol=True):
        p.add_argument("--config", help="RunConfig JSON/TOML; flags override")
        if needs_symbol:
            p.add_argument("--symbol", dest="symbol_path", help="symbol spec file")
        p.add_argument("--potential", dest="potential_path",
                       help="potential (or field) spec file")
        p.add_argument("--window", dest="window_radius", type=int, help="dual window radius")
        p.add_argument("--grid", dest="grid_n", type=int, help="grid points per dimension")
        p.add_argument("--cutoff", dest="cutoff_n", type=int, help="momentum cutoff index N")
        p.add_argument("--k-keep", dest="k_keep", type=int, help="eigenvalues kept per fiber")
        p.add_argument("--xi", help="single quasi-momentum, comma-separated")
        p.add_argument("--out", dest="output", help="output file")
        p.add_argument("--json-out", dest="json_output", help="JSON provenance output")
        p.add_argument("--seed", type=int, help="seed for any sampling")

    p_bands = sub.add_parser("bands", help="band structure along a momentum path")
    common(p_bands)
    p_bands.add_argument("--path", help="waypoints 'x1,..;x1,..' in the dual cell")
    p_bands.add_argument("--samples", dest="samples_per_segment", type=int,
                         help="samples per path segment")
    p_bands.set_defaults(func=cmd_bands)

    p_flux = sub.add_parser("check-flux", help="run the zero-mean-face flux gate")
    common(p_flux, needs_symbol=False)
    p_flux.set_defaults(func=cmd_check_flux)

    p_kernel = sub.add_parser("kernel", help="dump the toroidal kernel on a grid")
    common(p_kernel)
    p_kernel.add_argument("--format", choices=("npy", "csv"), default="npy")
    p_kernel.set_defaults(func=cmd_kernel)

    p_fm = sub.add_parser("fiber-matrix", help="dump one fiber matrix")
    common(p_fm)
    p_fm.add_argument("--format", choices=("npy", "csv"), default="npy")
    p_fm.set_defaults(func=cmd_fiber_matrix)

    p_verify = sub.add_parser("verify", help="run the acceptance suites")
    p_verify.add_argument("--suites", help="comma-separated suite names "
                          f"(default: all of {', '.join(ACCEPTANCE_SUITES)})")
    p_verify.add_argument("--report", help="write a JSON report")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--debug-flip-sign", action="store_true",
                          help="mutate the symbol storage sign to demonstrate "
                               "that the Hermiticity gate bites")
    p_verify.set_defaults(func=cmd_verify)

    p_conv = sub.add_parser("converge", help="window/cutoff convergence study")
    common(p_conv)
    p_conv.add_argument("--windows", help="comma-separated window radii")
    p_conv.set_defaults(func=cmd_converge)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GateFailure as exc:
        print(f"gate failure: {exc}", file=sys.stderr)
        return EXIT_GATE
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
