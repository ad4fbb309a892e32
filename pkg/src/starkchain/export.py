"""Plot-ready tables (and minimal SVG heat maps) from saved sweep outputs."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .entanglement import entropy_profile
from .sweep import point_tag, write_csv

EXPORT_KINDS = (
    "s_vs_delta", "s_vs_L", "entropy_profile", "mutual_info",
    "density_heatmap", "collapse", "fractal_map",
)


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.DictReader(line for line in fh if not line.startswith("#"))]
    return rows


def _require(paths: list[Path]):
    missing = [str(p) for p in paths if not p.exists()]
    if missing:
        raise FileNotFoundError("missing input files: " + ", ".join(missing))


def _close(a: str, b: float) -> bool:
    return np.isclose(float(a), b)


def svg_heatmap(values: np.ndarray, path: Path, cell: int = 6):
    """Write a bare-bones SVG heat map of a 2D array (row 0 at the top)."""
    v = np.asarray(values, dtype=float)
    finite = v[np.isfinite(v)]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 1.0
    span = hi - lo if hi > lo else 1.0
    # three-anchor colormap: dark blue -> teal -> yellow
    anchors = np.array([[68, 1, 84], [33, 145, 140], [253, 231, 37]], dtype=float)

    def color(x: float) -> str:
        if not np.isfinite(x):
            return "#777777"
        t = (x - lo) / span
        seg, frac = (0, 2 * t) if t < 0.5 else (1, 2 * t - 1)
        rgb = anchors[seg] * (1 - frac) + anchors[seg + 1] * frac
        r, g, b = (int(round(c)) for c in rgb)
        return f"#{r:02x}{g:02x}{b:02x}"

    rows, cols = v.shape
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cols * cell}" '
        f'height="{rows * cell}" viewBox="0 0 {cols * cell} {rows * cell}">'
    ]
    for i in range(rows):
        for j in range(cols):
            parts.append(
                f'<rect x="{j * cell}" y="{i * cell}" width="{cell}" '
                f'height="{cell}" fill="{color(v[i, j])}"/>'
            )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")


def export_figure_data(
    kind: str,
    output_dir,
    out_path=None,
    gamma: float | None = None,
    delta: float | None = None,
    size: int | None = None,
) -> Path:
    """Write one plot-ready table of the given kind from saved sweep outputs.

    Reads the CSV/NPZ files that `run_sweep`/`run_phase_diagram` produced in
    `output_dir`; raises FileNotFoundError naming any absent inputs.  Returns
    the path written.  density_heatmap and fractal_map additionally write an
    SVG heat map next to the table.
    """
    if kind not in EXPORT_KINDS:
        raise ValueError(f"unknown export kind {kind!r}; choose from {EXPORT_KINDS}")
    outdir = Path(output_dir)

    if kind in ("s_vs_delta", "s_vs_L"):
        src = outdir / "sweep.csv"
        _require([src])
        rows = _read_csv(src)
        if gamma is not None:
            rows = [r for r in rows if _close(r["gamma"], gamma)]
        if kind == "s_vs_delta":
            table = [[float(r["delta"]), int(r["L"]), float(r["s_half_steady"])]
                     for r in rows]
            table.sort(key=lambda t: (t[0], t[1]))
            header = ["delta", "L", "s_half"]
            default_name = "fig_s_vs_delta.csv"
        else:
            if delta is not None:
                rows = [r for r in rows if _close(r["delta"], delta)]
            table = [[int(r["L"]), float(r["s_half_steady"]), float(r["delta"])]
                     for r in rows]
            table.sort(key=lambda t: (t[2], t[0]))
            header = ["L", "s_half", "delta"]
            default_name = "fig_s_vs_L.csv"
        path = Path(out_path) if out_path else outdir / default_name
        write_csv(path, header, table)
        return path

    if kind == "mutual_info":
        src = outdir / "mutual_info.csv"
        _require([src])
        rows = _read_csv(src)
        if gamma is not None:
            rows = [r for r in rows if _close(r["gamma"], gamma)]
        table = [[float(r["delta"]), int(r["L"]), float(r["mi"])] for r in rows]
        table.sort(key=lambda t: (t[0], t[1]))
        path = Path(out_path) if out_path else outdir / "fig_mutual_info.csv"
        write_csv(path, ["delta", "L", "mi"], table)
        return path

    if kind in ("entropy_profile", "density_heatmap"):
        if gamma is None or delta is None or size is None:
            raise ValueError(f"{kind} export needs gamma, delta and size")
        src = outdir / f"traj_{point_tag(gamma, delta, size)}.npz"
        _require([src])
        with np.load(src) as data:
            if kind == "entropy_profile":
                prof = entropy_profile(data["final_correlation"])
                path = Path(out_path) if out_path else outdir / f"fig_profile_{point_tag(gamma, delta, size)}.csv"
                write_csv(path, ["l", "s_l", "L"],
                          [[int(l), s, size] for l, s in prof])
                return path
            steps = data["density_steps"]
            dens = data["density_series"]
        path = Path(out_path) if out_path else outdir / f"fig_density_{point_tag(gamma, delta, size)}.csv"
        rows = [[int(steps[i]), j + 1, dens[i, j]]
                for i in range(len(steps)) for j in range(dens.shape[1])]
        write_csv(path, ["step", "site", "n"], rows)
        svg_heatmap(dens, path.with_suffix(".svg"))
        return path

    if kind == "collapse":
        if gamma is None:
            raise ValueError("collapse export needs gamma")
        src = outdir / f"collapse_g{gamma:g}.csv"
        fits = outdir / "collapse.json"
        _require([src, fits])
        rows = _read_csv(src)
        fit = json.loads(fits.read_text())[f"{gamma:g}"]
        table = [[float(r["x"]), float(r["y"]), int(r["L"]), float(r["delta"])]
                 for r in rows]
        path = Path(out_path) if out_path else outdir / f"fig_collapse_g{gamma:g}.csv"
        write_csv(
            path, ["x", "y", "L", "delta"], table,
            comments=[
                f"delta_c={fit['delta_c']:.17e} nu={fit['nu']:.17e} zeta={fit['zeta']:.17e}"
            ],
        )
        return path

    # fractal_map
    src = outdir / "fractal.csv"
    _require([src])
    rows = _read_csv(src)
    gammas = sorted({float(r["gamma"]) for r in rows})
    deltas = sorted({float(r["delta"]) for r in rows})
    grid = np.full((len(gammas), len(deltas)), np.nan)
    for r in rows:
        i = gammas.index(float(r["gamma"]))
        j = deltas.index(float(r["delta"]))
        grid[i, j] = float(r["gamma_bar"])
    table = [[r_g, r_d, grid[i, j]]
             for i, r_g in enumerate(gammas) for j, r_d in enumerate(deltas)]
    path = Path(out_path) if out_path else outdir / "fig_fractal_map.csv"
    write_csv(path, ["gamma", "delta", "gamma_bar"], table)
    svg_heatmap(grid, path.with_suffix(".svg"))
    return path
