"""Command-line front end.

Subcommands cover the individual stages (deposit, solve, sweep, fit,
contours, boxdim) and the full experiment pipeline (run).  Options may
also come from a flat key=value config file; explicit flags win.  List
values accept either comma-separated items or start:stop:step ranges.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import contour, fitting, fractal, geometry, gridio, pipeline, raster, transport
from .geometry import BoxSpec, DiskDepositor, SaturationError
from .solver import NonConvergence, SolverSettings
from .transport import InconsistentFlux, solve_fraction

_DOMAIN_ERRORS = (SaturationError, NonConvergence, InconsistentFlux,
                  fitting.DegenerateData, fractal.EmptyMask,
                  fractal.InsufficientScales, ValueError, OSError)

_DEFAULTS = {
    "size": 256,
    "box_length": 10.24,
    "seed": [1],
    "p_grid": None,          # falls back to pipeline.default_p_grid()
    "sigma_inf": 1e-4,
    "tol": 1e-8,
    "levels": "0.1:0.9:0.1",
    "workers": 1,
    "out": "runs",
}


def parse_value_list(text: str) -> list[float]:
    """Either `a,b,c` items or an inclusive `start:stop:step` range."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range spec must be start:stop:step, got {text!r}")
        start, stop, step = (float(x) for x in parts)
        if step <= 0:
            raise ValueError("range step must be positive")
        values = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + step * 1e-9:
                break
            values.append(round(v, 10))
            k += 1
        if not values:
            raise ValueError(f"empty range {text!r}")
        return values
    return [float(x) for x in text.split(",") if x.strip()]


def parse_config(path: str) -> dict:
    """Flat key=value file; '#' starts a comment, blank lines ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve(args: argparse.Namespace) -> dict:
    cfg = parse_config(args.config) if getattr(args, "config", None) else {}
    opts = {}

    def pick(key, conv):
        flag = getattr(args, key, None)
        if flag is not None:
            opts[key] = flag
        elif key in cfg:
            opts[key] = conv(cfg[key])
        else:
            opts[key] = _DEFAULTS[key]

    pick("size", int)
    pick("box_length", float)
    pick("seed", lambda s: [int(x) for x in s.replace(",", " ").split()])
    pick("p_grid", str)
    pick("sigma_inf", float)
    pick("tol", float)
    pick("levels", str)
    pick("workers", int)
    pick("out", str)

    if opts["p_grid"] is None:
        opts["p_values"] = pipeline.default_p_grid()
    else:
        opts["p_values"] = sorted(set(parse_value_list(opts["p_grid"])))
    opts["level_values"] = parse_value_list(opts["levels"])
    opts["box"] = BoxSpec(opts["box_length"], opts["size"])
    opts["settings"] = SolverSettings(tolerance=opts["tol"])
    return opts


def _seed_dir(opts: dict, seed: int) -> str:
    path = os.path.join(opts["out"], pipeline.box_label(opts["box"]), str(seed))
    os.makedirs(path, exist_ok=True)
    return path


def _cmd_deposit(args) -> int:
    opts = _resolve(args)
    for seed in opts["seed"]:
        depositor = DiskDepositor(seed, opts["box"])
        out_dir = _seed_dir(opts, seed)
        for p in opts["p_values"]:
            depositor.extend_to(p)
            config = depositor.snapshot()
            path = os.path.join(out_dir, f"p{p!r}_config.txt")
            geometry.save_configuration(config, path)
            print(f"seed={seed} p={p!r} achieved={config.achieved_fraction!r} "
                  f"disks={len(config)} file={path}")
    return 0


def _cmd_solve(args) -> int:
    opts = _resolve(args)
    for seed in opts["seed"]:
        depositor = DiskDepositor(seed, opts["box"])
        out_dir = _seed_dir(opts, seed)
        for p in opts["p_values"]:
            point, potential = solve_fraction(depositor, p, 1.0,
                                              opts["sigma_inf"],
                                              opts["settings"])
            tag = f"p{p!r}"
            gridio.write_pgm(os.path.join(out_dir, f"{tag}_potential.pgm"),
                             gridio.field_to_image(potential.phi))
            gridio.write_raw_f64(os.path.join(out_dir, f"{tag}_potential.f64"),
                                 potential.phi)
            grid = raster.from_mask(depositor.covered_mask, opts["box"],
                                    1.0, opts["sigma_inf"])
            raster.export_pgm(grid, os.path.join(out_dir, f"{tag}_grid.pgm"))
            print(f"seed={seed} p={p!r} sigma_total={point.sigma_total!r} "
                  f"iterations={point.iterations} residual={point.residual!r}")
    return 0


def _cmd_sweep(args) -> int:
    opts = _resolve(args)
    for seed in opts["seed"]:
        curve = transport.sweep_curve(seed, opts["box"], opts["p_values"],
                                      settings=opts["settings"],
                                      sigma_inf=opts["sigma_inf"])
        path = os.path.join(_seed_dir(opts, seed), "curve.csv")
        transport.write_curve_csv(curve, path)
        print(f"seed={seed} points={len(curve.points)} file={path}")
    return 0


def _cmd_fit(args) -> int:
    entries = []
    for path in args.curves:
        curve = transport.read_curve_csv(path)
        result = fitting.fit(curve.fractions, curve.sigmas, seed=curve.seed)
        entries.append((curve.seed, curve.box.lattice_size, result))
        print(f"seed={curve.seed} N={curve.box.lattice_size} "
              f"p_c={result.p_c!r} t={result.t!r} sse={result.sse!r} "
              f"points={result.points}")
    if getattr(args, "out", None):
        os.makedirs(args.out, exist_ok=True)
        fitting.write_fit_csv(os.path.join(args.out, "fit.csv"), entries)
    return 0


def _cmd_contours(args) -> int:
    opts = _resolve(args)
    for seed in opts["seed"]:
        depositor = DiskDepositor(seed, opts["box"])
        out_dir = _seed_dir(opts, seed)
        for p in opts["p_values"]:
            _, potential = solve_fraction(depositor, p, 1.0,
                                          opts["sigma_inf"], opts["settings"])
            contours = contour.extract_levels(potential.phi,
                                              opts["level_values"])
            tag = f"p{p!r}"
            contour.write_segments_csv(
                contours, os.path.join(out_dir, f"{tag}_segments.csv"))
            pooled = contour.rasterize_contours(contours)
            contour.export_overlay_pgm(
                pooled, os.path.join(out_dir, f"{tag}_contours.pgm"))
            print(f"seed={seed} p={p!r} segments={contours.total_segments()}")
    return 0


def _cmd_boxdim(args) -> int:
    opts = _resolve(args)
    for seed in opts["seed"]:
        curve = fractal.dimension_curve(seed, opts["box"], opts["p_values"],
                                        levels=opts["level_values"],
                                        settings=opts["settings"],
                                        sigma_inf=opts["sigma_inf"])
        path = os.path.join(_seed_dir(opts, seed), "dcurve.csv")
        fractal.write_dimension_csv(curve, path)
        for pt in curve.points:
            print(f"seed={seed} p={pt.p!r} D={pt.dimension!r} "
                  f"r_squared={pt.r_squared!r}")
    return 0


def _cmd_run(args) -> int:
    opts = _resolve(args)
    spec = pipeline.RunSpec(box_list=[opts["box"]], seeds=opts["seed"],
                            p_grid=opts["p_values"],
                            levels=opts["level_values"],
                            solver=opts["settings"],
                            sigma_inf=opts["sigma_inf"],
                            output_dir=opts["out"])
    report = pipeline.run(spec, workers=opts["workers"])
    for (label, seed), result in sorted(report.fits.items()):
        print(f"box={label} seed={seed} p_c={result.p_c!r} t={result.t!r}")
    print(f"failures={len(report.failures)} manifest={report.manifest_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--size", type=int, help="lattice cells per side")
    common.add_argument("--box-length", type=float, dest="box_length",
                        help="box side length in disk radii")
    common.add_argument("--seed", type=int, action="append",
                        help="random seed (repeatable)")
    common.add_argument("--p-grid", dest="p_grid",
                        help="target fractions, list or start:stop:step")
    common.add_argument("--sigma-inf", type=float, dest="sigma_inf",
                        help="background conductivity (default 1e-4)")
    common.add_argument("--tol", type=float, help="solver tolerance (default 1e-8)")
    common.add_argument("--levels",
                        help="potential levels, list or range (default 0.1:0.9:0.1)")
    common.add_argument("--workers", type=int, help="worker process count")
    common.add_argument("--out", help="output directory (default runs)")
    common.add_argument("--config", help="key=value config file")

    parser = argparse.ArgumentParser(
        prog="diskperc",
        description="Disk percolation conductivity and equipotential analysis")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("deposit", parents=[common],
                   help="write disk configurations").set_defaults(fn=_cmd_deposit)
    sub.add_parser("solve", parents=[common],
                   help="solve potentials, export fields").set_defaults(fn=_cmd_solve)
    sub.add_parser("sweep", parents=[common],
                   help="conductivity curves per seed").set_defaults(fn=_cmd_sweep)
    fit_p = sub.add_parser("fit", parents=[common],
                           help="fit threshold power law to curve CSVs")
    fit_p.add_argument("curves", nargs="+", help="curve CSV files")
    fit_p.set_defaults(fn=_cmd_fit)
    sub.add_parser("contours", parents=[common],
                   help="equipotential segments and overlays").set_defaults(fn=_cmd_contours)
    sub.add_parser("boxdim", parents=[common],
                   help="box dimension of pooled contours").set_defaults(fn=_cmd_boxdim)
    sub.add_parser("run", parents=[common],
                   help="full multi-seed pipeline").set_defaults(fn=_cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _DOMAIN_ERRORS as exc:
        print(f"diskperc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
