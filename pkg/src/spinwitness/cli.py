"""Command-line interface.

Subcommands: single, scan-distance, scan-size, scan-2d, noise-map, fit.
Exit codes: 0 success, 1 validation or usage error, 2 numeric failure.
Default thread count can be set via the SPINWITNESS_THREADS environment
variable; the --threads flag overrides it.
"""

import argparse
import csv
import dataclasses
import os
import sys

from . import experiments, model, runio
from .errors import NumericError, ResourceError, ValidationError

THREADS_ENV = "SPINWITNESS_THREADS"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors raise instead of exiting 2."""

    def error(self, message):
        raise ValidationError(message)


def _build_parser():
    parser = _Parser(
        prog="spinwitness",
        description="Triplet-spin condensation-witness simulator",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    def common(p):
        p.add_argument("--config", help="key/value config file")
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--seed", type=int, help="base seed override")
        p.add_argument("--threads", type=int, help="worker thread count")
        p.add_argument("--kappa", type=float, help="dipole prefactor GHz*nm^3")
        p.add_argument("--plot", action="store_true", help="also write an SVG")
        p.add_argument(
            "--ground-reference",
            choices=("eigenstate", "product"),
            help="reference ground state for amplitudes",
        )

    p = sub.add_parser("single", help="one geometry: print A, lambda, spectrum")
    common(p)
    p.add_argument("--n", type=int, help="site count")
    p.add_argument("--spacing", type=float, help="chain spacing in angstrom")

    p = sub.add_parser("scan-distance", help="fixed-N chain over distances")
    common(p)
    p.add_argument("--n", type=int, help="site count")
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--r-step", type=float)

    p = sub.add_parser("scan-size", help="chain over site counts")
    common(p)
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument(
        "--non-interacting", action="store_true", help="set kappa to zero"
    )

    p = sub.add_parser("scan-2d", help="two-row grid over site counts")
    common(p)
    p.add_argument("--plane", choices=("ZY", "XY"))
    p.add_argument("--n-min", type=int, dest="grid_n_min")
    p.add_argument("--n-max", type=int, dest="grid_n_max")

    p = sub.add_parser("noise-map", help="Monte Carlo noise heat map")
    common(p)
    p.add_argument("--n", type=int, help="site count")
    p.add_argument("--reps", type=int, help="repetitions per cell")

    p = sub.add_parser("fit", help="power-law fit of a two-column CSV")
    p.add_argument("csv_path", help="CSV with two numeric columns (x, y)")
    return parser


_FLAG_FIELDS = {
    "seed": "base_seed",
    "threads": "threads",
    "kappa": "kappa",
    "ground_reference": "ground_reference",
    "n": "n",
    "spacing": "spacing",
    "r_min": "r_min",
    "r_max": "r_max",
    "r_step": "r_step",
    "n_min": "n_min",
    "n_max": "n_max",
    "plane": "plane",
    "grid_n_min": "grid_n_min",
    "grid_n_max": "grid_n_max",
    "reps": "repetitions",
}


def _resolve_config(args):
    """File config (if given) with CLI flags taking precedence."""
    cfg = experiments.ScanConfig()
    if args.config:
        cfg = runio.parse_config(args.config, base=cfg)
    overrides = {}
    for flag, field in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, "threads", None) is None and os.environ.get(THREADS_ENV):
        try:
            overrides["threads"] = int(os.environ[THREADS_ENV])
        except ValueError:
            raise ValidationError(
                f"{THREADS_ENV} must be an integer, "
                f"got {os.environ[THREADS_ENV]!r}"
            ) from None
    cfg = dataclasses.replace(cfg, **overrides)
    return cfg, sorted(overrides)


def _emit(cfg, records, family, out_dir, plot, flag_overrides):
    os.makedirs(out_dir, exist_ok=True)
    entries = [runio.write_csv(records, os.path.join(out_dir, f"{family}.csv"))]
    if plot:
        path = os.path.join(out_dir, f"{family}.svg")
        from . import plots

        plots.emit_plot(records, family, path)
        entries.append({"path": os.path.basename(path), "family": family})
    runio.write_manifest(
        cfg, entries, os.path.join(out_dir, "manifest.json"), flag_overrides
    )
    print(f"wrote {family}.csv ({len(records)} rows) to {out_dir}")


def _cmd_single(args):
    cfg, _ = _resolve_config(args)
    spacing = args.spacing if args.spacing is not None else cfg.spacing
    geom = model.chain_y(cfg.n, spacing, d0=cfg.d0)
    res = experiments.evaluate_geometry(
        geom,
        cfg.kappa,
        ground_reference=cfg.ground_reference,
        seed=cfg.base_seed,
        lowest_k=cfg.lowest_k,
    )
    h = model.total_h(geom, cfg.kappa)
    if cfg.n <= model.DENSE_SITE_LIMIT:
        from . import linalg

        eig = linalg.eigh_dense(h.to_dense())
        head = eig.values[: min(6, eig.values.size)]
    else:
        from . import linalg

        head = linalg.eig_lowest_k(h, 6, seed=cfg.base_seed).values
    print(f"n = {cfg.n}  spacing = {spacing:g} A  kappa = {cfg.kappa:g}")
    print(f"amplitude = {res.amplitude:.12g}")
    print(f"lambda    = {res.lam:.12g}")
    print("spectrum head (GHz): " + "  ".join(f"{e:.9g}" for e in head))
    return 0


def _cmd_scan_distance(args):
    cfg, flags = _resolve_config(args)
    records = experiments.run_distance_scan(cfg)
    _emit(cfg, records, "distance", args.out_dir, args.plot, flags)
    return 0


def _cmd_scan_size(args):
    cfg, flags = _resolve_config(args)
    records = experiments.run_size_scan(cfg, interacting=not args.non_interacting)
    _emit(cfg, records, "size", args.out_dir, args.plot, flags)
    return 0


def _cmd_scan_2d(args):
    cfg, flags = _resolve_config(args)
    records = experiments.run_grid2d_scan(cfg)
    _emit(cfg, records, "grid2d", args.out_dir, args.plot, flags)
    return 0


def _cmd_noise_map(args):
    cfg, flags = _resolve_config(args)
    records = experiments.run_noise_map(cfg)
    _emit(cfg, records, "noise", args.out_dir, args.plot, flags)
    return 0


def _cmd_fit(args):
    xs, ys = [], []
    with open(args.csv_path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or len(row) < 2:
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                continue  # header or comment row
            xs.append(x)
            ys.append(y)
    fit = experiments.fit_power_law(xs, ys)
    print(f"a = {fit.prefactor:.12g}")
    print(f"b = {fit.exponent:.12g}")
    print(f"residual = {fit.residual_norm:.6g}  iterations = {fit.iterations}")
    return 0


_COMMANDS = {
    "single": _cmd_single,
    "scan-distance": _cmd_scan_distance,
    "scan-size": _cmd_scan_size,
    "scan-2d": _cmd_scan_2d,
    "noise-map": _cmd_noise_map,
    "fit": _cmd_fit,
}


def cli_dispatch(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_usage(sys.stderr)
            return 1
        return _COMMANDS[args.command](args)
    except (ValidationError, ResourceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, ValidationError):
            parser.print_usage(sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


def main():
    raise SystemExit(cli_dispatch())


if __name__ == "__main__":
    main()
