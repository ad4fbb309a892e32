"""Command-line entry point.

Verbs: simulate (grid sweep), phase-diagram, collapse (refit saved rows),
spectral (fractal dimensions and analytic boundaries), export (plot-ready
tables), verify (invariant suite on a saved trajectory file).

Exit codes: 0 success, 1 partial (some rows failed or a check failed),
2 config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", required=True, help="JSON sweep configuration")
    p.add_argument("--output", help="output directory (overrides config)")
    p.add_argument("--workers", type=int, help="parallel workers (overrides config)")
    p.add_argument("--preset", choices=("paper", "desk"), help="schedule preset")
    p.add_argument("--seed", type=int, help="collapse/bootstrap seed (overrides config)")


def _load(args):
    from .sweep import load_config

    config = load_config(args.config, preset=args.preset)
    if args.output:
        config = replace(config, output_dir=args.output)
    if args.workers:
        config = replace(config, workers=args.workers)
    if args.seed is not None:
        config = replace(
            config, collapse_options=replace(config.collapse_options, seed=args.seed)
        )
    return config


def _manifest_exit(manifest: dict) -> int:
    return EXIT_OK if manifest["status"] == "complete" else EXIT_PARTIAL


def cmd_simulate(args) -> int:
    from .sweep import run_sweep

    config = _load(args)
    manifest = run_sweep(config)
    print(f"wrote {len(manifest['files'])} files to {config.output_dir} "
          f"({manifest['status']})")
    return _manifest_exit(manifest)


def cmd_phase_diagram(args) -> int:
    from .sweep import run_phase_diagram

    manifest = run_phase_diagram(_load(args))
    print(f"phase diagram written ({manifest['status']})")
    return _manifest_exit(manifest)


def cmd_collapse(args) -> int:
    from .sweep import _emit_collapse

    config = _load(args)
    rows_path = Path(config.output_dir) / "sweep.csv"
    if not rows_path.exists():
        print(f"no sweep rows at {rows_path}; run simulate first", file=sys.stderr)
        return EXIT_IO
    import csv as _csv

    with open(rows_path, newline="", encoding="utf-8") as fh:
        rows = list(_csv.DictReader(line for line in fh if not line.startswith("#")))
    results = [
        {
            "gamma": float(r["gamma"]),
            "delta": float(r["delta"]),
            "L": int(r["L"]),
            "s_half_steady": float(r["s_half_steady"]),
            "error": None,
        }
        for r in rows
        if np.isfinite(float(r["s_half_steady"]))
    ]
    _emit_collapse(config, Path(config.output_dir), results)
    fits_path = Path(config.output_dir) / "collapse.json"
    if not fits_path.exists():
        print("no usable rows for any configured gamma", file=sys.stderr)
        return EXIT_PARTIAL
    fits = json.loads(fits_path.read_text())
    failed = False
    for key, fit in sorted(fits.items()):
        if "error" in fit:
            print(f"gamma={key}: collapse failed: {fit['error']}", file=sys.stderr)
            failed = True
        else:
            print(f"gamma={key}: delta_c={fit['delta_c']:.4f} +- {fit['delta_c_err']:.4f}  "
                  f"nu={fit['nu']:.3f}  zeta={fit['zeta']:.3f}  quality={fit['quality']:.3e}")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_spectral(args) -> int:
    from .sweep import run_spectral

    manifest = run_spectral(_load(args))
    print(f"spectral map written ({manifest['status']})")
    return _manifest_exit(manifest)


def cmd_export(args) -> int:
    from .export import export_figure_data

    path = export_figure_data(
        args.kind,
        args.output,
        out_path=args.out,
        gamma=args.gamma,
        delta=args.delta,
        size=args.size,
    )
    print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .entanglement import subsystem_entropy
    from .propagation import validate_correlation

    path = Path(args.input)
    if not path.exists():
        print(f"no such file: {path}", file=sys.stderr)
        return EXIT_IO
    with np.load(path) as data:
        length = int(data["length"])
        C = data["final_correlation"]
        dens = data["density_series"]
        ee = data["ee_series"]
    n = length // 2
    checks = validate_correlation(C, n, atol=args.atol)
    density_sum = float(np.max(np.abs(dens.sum(axis=1) - n)))
    checks["density_sum"] = density_sum
    purity = 0.0
    for ell in range(1, length):
        left = subsystem_entropy(C, range(1, ell + 1))
        right = subsystem_entropy(C, range(ell + 1, length + 1))
        purity = max(purity, abs(left - right))
    checks["purity_symmetry"] = purity
    checks["ee_nonnegative"] = float(max(0.0, -ee.min()))
    ok = True
    for name, value in checks.items():
        if name == "ok":
            continue
        passed = value <= (1e-6 if name == "purity_symmetry" else args.atol)
        ok = ok and passed
        print(f"{'PASS' if passed else 'FAIL'}  {name:18s} {value:.3e}")
    return EXIT_OK if ok else EXIT_PARTIAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starkchain",
        description="Nonunitary free-fermion dynamics on a tilted nonreciprocal chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (
        ("simulate", cmd_simulate),
        ("phase-diagram", cmd_phase_diagram),
        ("collapse", cmd_collapse),
        ("spectral", cmd_spectral),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("export")
    p.add_argument("--kind", required=True,
                   choices=("s_vs_delta", "s_vs_L", "entropy_profile", "mutual_info",
                            "density_heatmap", "collapse", "fractal_map"))
    p.add_argument("--output", required=True, help="sweep output directory to read")
    p.add_argument("--out", help="path of the table to write")
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--size", type=int)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("verify")
    p.add_argument("--input", required=True, help="saved trajectory .npz")
    p.add_argument("--atol", type=float, default=1e-8)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, json.JSONDecodeError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
