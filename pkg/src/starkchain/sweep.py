"""Config-driven grid runner: trajectories over (gamma, delta, L) with persistence.

Outputs are plain CSV/JSON/NPZ files in an output directory, listed in a
manifest with content hashes.  Runs are deterministic: a rerun with an
identical config (including seed) produces byte-identical files, independent
of the worker count.  Wall-clock timing is therefore only recorded when
`record_timings` is enabled, since real timings vary between runs.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .entanglement import mutual_information, standard_probe_regions, steady_state_entropy
from .model import Boundary, ModelParams, build_hamiltonian
from .propagation import Schedule, TrajectoryError, run_trajectory
from .scaling import (
    CollapseError,
    ScalingDataset,
    fit_collapse,
    power_law_fit,
)
from .spectral import average_fractal_dimension, phase_boundaries


@dataclass(frozen=True)
class Smoothing:
    sigma: float = 20.0
    tail_fraction: float = 0.25


@dataclass(frozen=True)
class Analyses:
    collapse: bool = False
    power_law: bool = False
    cft_fit: bool = False
    fractal: bool = False
    mutual_info: bool = False
    density_movie: bool = False


@dataclass(frozen=True)
class CollapseOptions:
    init: tuple = (0.15, 1.9, 2.0)
    bounds: tuple = ((0.005, 1.0), (0.5, 4.0), (0.5, 4.0))
    window_min_delta: object = 0.1   # scalar, or {gamma: value} mapping
    bootstrap_n: int = 100
    seed: int = 7

    def min_delta_for(self, gamma: float) -> float | None:
        w = self.window_min_delta
        if w is None:
            return None
        if isinstance(w, dict):
            for key, val in w.items():
                if np.isclose(float(key), gamma):
                    return float(val)
            return None
        return float(w)


@dataclass(frozen=True)
class SweepConfig:
    gamma_values: tuple
    delta_values: tuple
    sizes: tuple
    boundary: Boundary = Boundary.OPEN
    schedule: Schedule = field(default_factory=Schedule)
    smoothing: Smoothing = field(default_factory=Smoothing)
    analyses: Analyses = field(default_factory=Analyses)
    collapse_options: CollapseOptions = field(default_factory=CollapseOptions)
    output_dir: str = "out"
    workers: int = 1
    record_timings: bool = False
    save_trajectories: bool = False

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if not self.gamma_values or not self.delta_values or not self.sizes:
            raise ValueError("gamma_values, delta_values and sizes must be nonempty")
        if any(L % 2 != 0 for L in self.sizes):
            raise ValueError("all sizes must be even")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


PRESETS = {
    "paper": {"schedule": {"dt": 10.0, "steps": 10000, "early_stop": False}},
    "desk": {"schedule": {"dt": 10.0, "steps": 2000, "early_stop": True}},
}


def _merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def config_from_dict(raw: dict, preset: str | None = None) -> SweepConfig:
    """Build a SweepConfig from a JSON-style dict, optionally under a preset."""
    data: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        data = _merge(data, PRESETS[preset])
    data = _merge(data, raw)

    def sub(cls, key, **extra):
        kwargs = dict(data.get(key, {}))
        kwargs.update(extra)
        return cls(**kwargs)

    copts = dict(data.get("collapse_options", {}))
    if "init" in copts:
        copts["init"] = tuple(copts["init"])
    if "bounds" in copts:
        copts["bounds"] = tuple(tuple(b) for b in copts["bounds"])
    return SweepConfig(
        gamma_values=tuple(float(g) for g in data["gamma_values"]),
        delta_values=tuple(float(d) for d in data["delta_values"]),
        sizes=tuple(int(s) for s in data["sizes"]),
        boundary=Boundary(data.get("boundary", "open")),
        schedule=sub(Schedule, "schedule"),
        smoothing=sub(Smoothing, "smoothing"),
        analyses=sub(Analyses, "analyses"),
        collapse_options=CollapseOptions(**copts),
        output_dir=str(data.get("output_dir", "out")),
        workers=int(data.get("workers", 1)),
        record_timings=bool(data.get("record_timings", False)),
        save_trajectories=bool(data.get("save_trajectories", False)),
    )


def load_config(path, preset: str | None = None) -> SweepConfig:
    """Read a JSON config file into a SweepConfig."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return config_from_dict(raw, preset=preset)


def config_as_dict(config: SweepConfig) -> dict:
    out = asdict(config)
    out["boundary"] = config.boundary.value
    return out


# ---------------------------------------------------------------------------
# serialization helpers

def format_cell(value) -> str:
    """Deterministic CSV cell: floats in 17-digit scientific notation."""
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17e}"
    return str(value)


def write_csv(path: Path, header: list, rows: list, comments: list | None = None):
    lines = []
    for c in comments or []:
        lines.append(f"# {c}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def point_tag(gamma: float, delta: float, length: int) -> str:
    return f"g{gamma:g}_d{delta:g}_L{length}"


# ---------------------------------------------------------------------------
# single grid point

ROW_COLUMNS = [
    "gamma", "delta", "L", "boundary",
    "s_half_steady", "s_half_raw_final", "converged", "wall_time_s",
]


def _run_point(config: SweepConfig, gamma: float, delta: float, length: int) -> dict:
    """Run one trajectory; never raises, failures are recorded in the result."""
    t0 = time.perf_counter()
    result = {
        "gamma": gamma, "delta": delta, "L": length,
        "boundary": config.boundary.value,
        "s_half_steady": float("nan"), "s_half_raw_final": float("nan"),
        "converged": False, "wall_time_s": 0.0, "error": None,
        "mi_steady": None, "detail": None,
    }
    mi_steps: list = []
    mi_vals: list = []
    want_mi = config.analyses.mutual_info and length % 8 == 0
    if want_mi:
        region_a, region_b = standard_probe_regions(length)

        def on_sample(step, state, C):
            mi_steps.append(step)
            mi_vals.append(mutual_information(C, region_a, region_b))
    else:
        on_sample = None

    try:
        params = ModelParams(gamma=gamma, delta=delta, length=length,
                             boundary=config.boundary)
        record = run_trajectory(params, config.schedule, on_sample=on_sample)
    except (TrajectoryError, ValueError) as err:
        result["error"] = str(err)
        return result

    sm = config.smoothing
    result["s_half_steady"] = steady_state_entropy(record, sm.sigma, sm.tail_fraction)
    result["s_half_raw_final"] = float(record.ee_series[-1])
    result["converged"] = bool(record.converged)
    if config.record_timings:
        result["wall_time_s"] = time.perf_counter() - t0

    if want_mi and mi_vals:
        n_tail = max(1, int(round(sm.tail_fraction * len(mi_vals))))
        result["mi_steady"] = float(np.mean(mi_vals[-n_tail:]))

    keep_detail = (config.save_trajectories or config.analyses.cft_fit
                   or config.analyses.density_movie)
    if keep_detail:
        detail = {
            "gamma": np.float64(gamma),
            "delta": np.float64(delta),
            "length": np.int64(length),
            "periodic": np.int64(config.boundary is Boundary.PERIODIC),
            "dt": np.float64(record.dt),
            "steps": np.int64(record.steps),
            "converged": np.int64(record.converged),
            "ee_series": record.ee_series,
            "density_steps": record.density_steps,
            "density_series": record.density_series,
            "final_correlation": record.final_correlation,
        }
        if want_mi and mi_vals:
            detail["mi_steps"] = np.asarray(mi_steps, dtype=int)
            detail["mi_series"] = np.asarray(mi_vals)
        result["detail"] = detail
    return result


def _sorted_grid(config: SweepConfig) -> list:
    return [
        (g, d, L)
        for g in sorted(config.gamma_values)
        for d in sorted(config.delta_values)
        for L in sorted(config.sizes)
    ]


def _run_grid(config: SweepConfig) -> list:
    grid = _sorted_grid(config)
    if config.workers == 1 or len(grid) == 1:
        return [_run_point(config, *pt) for pt in grid]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(_run_point, config, *pt) for pt in grid]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# sweep drivers

def _emit_rows(outdir: Path, results: list) -> Path:
    rows = [[r[c] for c in ROW_COLUMNS] for r in results]
    path = outdir / "sweep.csv"
    write_csv(path, ROW_COLUMNS, rows)
    return path


def _emit_analyses(config: SweepConfig, outdir: Path, results: list) -> list:
    from .entanglement import entropy_profile  # local import keeps module load light
    from .scaling import cft_log_fit

    files = []
    ok = [r for r in results if r["error"] is None]

    if config.analyses.mutual_info:
        mi_rows = [
            [r["gamma"], r["delta"], r["L"], r["mi_steady"]]
            for r in ok if r["mi_steady"] is not None
        ]
        if mi_rows:
            path = outdir / "mutual_info.csv"
            write_csv(path, ["gamma", "delta", "L", "mi"], mi_rows)
            files.append(path)

    if config.analyses.power_law:
        fits = {}
        for g in sorted(config.gamma_values):
            for d in sorted(config.delta_values):
                pts = [(r["L"], r["s_half_steady"]) for r in ok
                       if r["gamma"] == g and r["delta"] == d
                       and r["s_half_steady"] > 0]
                if len(pts) >= 3:
                    pts.sort()
                    fit = power_law_fit([p[0] for p in pts], [p[1] for p in pts])
                    fits[f"gamma={g:g},delta={d:g}"] = {
                        "beta": fit.beta, "stderr": fit.stderr, "n_sizes": len(pts),
                    }
        if fits:
            path = outdir / "power_law.json"
            write_json(path, fits)
            files.append(path)

    if config.analyses.collapse:
        files.extend(_emit_collapse(config, outdir, ok))

    if config.analyses.fractal:
        frows = []
        L = max(config.sizes)
        for g in sorted(config.gamma_values):
            for d in sorted(config.delta_values):
                params = ModelParams(g, d, L, config.boundary)
                frows.append([g, d, L, average_fractal_dimension(build_hamiltonian(params))])
        path = outdir / "fractal.csv"
        write_csv(path, ["gamma", "delta", "L", "gamma_bar"], frows)
        files.append(path)

    if config.analyses.cft_fit:
        fit_entries = {}
        for r in ok:
            if r["detail"] is None:
                continue
            prof = entropy_profile(r["detail"]["final_correlation"])
            tag = point_tag(r["gamma"], r["delta"], r["L"])
            path = outdir / f"profile_{tag}.csv"
            write_csv(path, ["l", "s_l", "L"],
                      [[int(l), s, r["L"]] for l, s in prof])
            files.append(path)
            try:
                fit = cft_log_fit(prof, r["L"])
                fit_entries[tag] = {"c": fit.c, "const": fit.const,
                                    "rms_residual": fit.rms_residual}
            except ValueError as err:
                fit_entries[tag] = {"error": str(err)}
        if fit_entries:
            path = outdir / "cft_fit.json"
            write_json(path, fit_entries)
            files.append(path)

    if config.analyses.density_movie:
        for r in ok:
            if r["detail"] is None:
                continue
            tag = point_tag(r["gamma"], r["delta"], r["L"])
            path = outdir / f"density_{tag}.csv"
            steps = r["detail"]["density_steps"]
            dens = r["detail"]["density_series"]
            rows = [
                [int(steps[i]), site + 1, dens[i, site]]
                for i in range(len(steps)) for site in range(dens.shape[1])
            ]
            write_csv(path, ["step", "site", "n"], rows)
            files.append(path)

    if config.save_trajectories or config.analyses.cft_fit or config.analyses.density_movie:
        for r in ok:
            if r["detail"] is None:
                continue
            tag = point_tag(r["gamma"], r["delta"], r["L"])
            path = outdir / f"traj_{tag}.npz"
            np.savez(path, **r["detail"])
            files.append(path)

    return files


def _emit_collapse(config: SweepConfig, outdir: Path, ok_results: list) -> list:
    files = []
    fits = {}
    for g in sorted(config.gamma_values):
        pts = [
            (r["L"], r["delta"], r["s_half_steady"])
            for r in ok_results if r["gamma"] == g and np.isfinite(r["s_half_steady"])
        ]
        if not pts:
            continue
        data = ScalingDataset.from_points(pts)
        min_d = config.collapse_options.min_delta_for(g)
        data = data.restrict_delta(min_delta=min_d)
        try:
            data.require_fit_invariants()
            fit = fit_collapse(
                data,
                init=config.collapse_options.init,
                bounds=config.collapse_options.bounds,
                bootstrap_n=config.collapse_options.bootstrap_n,
                seed=config.collapse_options.seed,
            )
        except (CollapseError, ValueError) as err:
            fits[f"{g:g}"] = {"error": str(err)}
            continue
        fits[f"{g:g}"] = fit.as_dict()
        x = data.sizes.astype(float) ** (1.0 / fit.nu) * (data.deltas - fit.delta_c)
        y = data.values * data.sizes.astype(float) ** (-fit.zeta / fit.nu)
        order = np.lexsort((x,))
        path = outdir / f"collapse_g{g:g}.csv"
        write_csv(
            path, ["x", "y", "L", "delta"],
            [[x[i], y[i], int(data.sizes[i]), data.deltas[i]] for i in order],
            comments=[f"delta_c={fit.delta_c:.17e} nu={fit.nu:.17e} zeta={fit.zeta:.17e}"],
        )
        files.append(path)
    if fits:
        path = outdir / "collapse.json"
        write_json(path, fits)
        files.append(path)
    return files


def _finish(config: SweepConfig, outdir: Path, results: list, files: list) -> dict:
    errors = [
        {"gamma": r["gamma"], "delta": r["delta"], "L": r["L"], "error": r["error"]}
        for r in results if r["error"] is not None
    ]
    manifest = {
        "config": config_as_dict(config),
        "status": "partial" if errors else "complete",
        "row_errors": errors,
        "files": [
            {"path": p.name, "sha256": sha256_file(p), "bytes": p.stat().st_size}
            for p in sorted(files, key=lambda p: p.name)
        ],
    }
    write_json(outdir / "manifest.json", manifest)
    return manifest


def run_sweep(config: SweepConfig) -> dict:
    """Run the full (gamma, delta, L) grid and persist rows plus analyses.

    Returns the manifest dict; the manifest file lists every output with its
    SHA-256.  A failing grid point is recorded in its row and in the manifest
    but does not abort the rest of the sweep.
    """
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    results = _run_grid(config)
    files = [_emit_rows(outdir, results)]
    files.extend(_emit_analyses(config, outdir, results))
    return _finish(config, outdir, results, files)


def run_phase_diagram(config: SweepConfig) -> dict:
    """Half-chain entropy heat map over (gamma, delta) plus fitted/analytic boundaries.

    The heat map uses the largest configured size; the companion boundaries
    file carries the per-gamma collapse estimate of the transition point next
    to the analytic skin-effect and tilt-localization boundaries.
    """
    if len(config.gamma_values) < 2 or len(config.delta_values) < 2:
        raise ValueError("phase diagram needs at least 2 gamma and 2 delta values")
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    results = _run_grid(config)
    files = [_emit_rows(outdir, results)]

    ok = [r for r in results if r["error"] is None]
    l_max = max(config.sizes)
    grid_rows = [
        [r["gamma"], r["delta"], r["s_half_steady"]]
        for r in ok if r["L"] == l_max
    ]
    path = outdir / "phase_diagram.csv"
    write_csv(path, ["gamma", "delta", "s_half"], grid_rows)
    files.append(path)

    cfg = replace(config, analyses=replace(config.analyses, collapse=True))
    files.extend(_emit_collapse(cfg, outdir, ok))

    brows = []
    fits_path = outdir / "collapse.json"
    fits = json.loads(fits_path.read_text()) if fits_path.exists() else {}
    for g in sorted(config.gamma_values):
        fit = fits.get(f"{g:g}", {})
        delta_c = fit.get("delta_c", float("nan"))
        delta_c_err = fit.get("delta_c_err", float("nan"))
        try:
            pb = phase_boundaries(g, l_max)
            d1, d2 = pb.delta_i, pb.delta_ii
        except ValueError:
            d1, d2 = float("nan"), float("nan")
        brows.append([g, delta_c, delta_c_err, d1, d2])
    path = outdir / "boundaries.csv"
    write_csv(path, ["gamma", "delta_c", "delta_c_err", "delta_i", "delta_ii"], brows)
    files.append(path)

    files.extend(_emit_analyses(config, outdir, results))
    return _finish(config, outdir, results, files)


def run_spectral(config: SweepConfig) -> dict:
    """Average fractal dimension over the grid plus analytic boundaries."""
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    L = max(config.sizes)
    rows = []
    for g in sorted(config.gamma_values):
        for d in sorted(config.delta_values):
            params = ModelParams(g, d, L, config.boundary)
            rows.append([g, d, L, average_fractal_dimension(build_hamiltonian(params))])
    files = []
    path = outdir / "fractal.csv"
    write_csv(path, ["gamma", "delta", "L", "gamma_bar"], rows)
    files.append(path)

    brows = []
    for g in sorted(config.gamma_values):
        try:
            pb = phase_boundaries(g, L)
            brows.append([g, float("nan"), float("nan"), pb.delta_i, pb.delta_ii])
        except ValueError:
            brows.append([g, float("nan"), float("nan"), float("nan"), float("nan")])
    path = outdir / "boundaries.csv"
    write_csv(path, ["gamma", "delta_c", "delta_c_err", "delta_i", "delta_ii"], brows)
    files.append(path)
    return _finish(config, outdir, [], files)
