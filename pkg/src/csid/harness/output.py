"""CSV tables, SVG figures and the on-disk layout of a run."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from ..signal_core import RNG_ALGORITHM
from .runner import ExperimentResult, ResultRow, timing_report

CSV_HEADER = ResultRow.FIELDS
PLOT_KINDS = ("distortion_vs_noise", "convergence_curve", "distortion_vs_k", "iterations_bar")


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".9g")


def emit_csv(rows, path) -> Path:
    """Write result rows with the fixed header; floats carry 9 significant digits."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in rows:
                w.writerow([_fmt(getattr(r, f)) for f in CSV_HEADER])
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc}") from exc
    return path


def read_csv(path) -> list:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        rows = []
        for rec in reader:
            rows.append(ResultRow(
                method=rec["method"],
                swept_param=rec["swept_param"],
                swept_value=float(rec["swept_value"]),
                trials=int(rec["trials"]),
                **{f: float(rec[f]) for f in CSV_HEADER[4:]},
            ))
    return rows


def emit_curves(result: ExperimentResult, path) -> Path:
    """Ensemble-mean distortion trajectories in long format."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("method", "swept_value", "iteration", "distortion"))
        for s in result.summaries:
            if s.aggregate is None or s.method == "compressive_plus_recovery":
                continue
            stride = s.aggregate.record_stride
            for i, d in enumerate(s.aggregate.trajectory):
                w.writerow((s.method, _fmt(s.swept_value), i * stride, _fmt(d)))
    return path


def read_curves(path) -> dict:
    curves = {}
    with Path(path).open(newline="") as fh:
        for rec in csv.DictReader(fh):
            key = (rec["method"], float(rec["swept_value"]))
            it, d = curves.setdefault(key, ([], []))
            it.append(int(rec["iteration"]))
            d.append(float(rec["distortion"]))
    return {k: (np.array(a), np.array(b)) for k, (a, b) in curves.items()}


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "csid"
    matplotlib.rcParams["svg.fonttype"] = "none"
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    return plt, fig, ax


def _by_method(rows):
    out = {}
    for r in rows:
        out.setdefault(r.method, []).append(r)
    for m in out:
        out[m].sort(key=lambda r: r.swept_value)
    return out


def emit_plot(data, kind: str, path) -> Path:
    """Render a table (list of rows) or curves (dict) to a deterministic SVG.

    ``convergence_curve`` takes ``{label: (iterations, distortion)}``; the
    other kinds take result rows.
    """
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
    if not data:
        raise ValueError("nothing to plot")
    path = Path(path)
    plt, fig, ax = _figure()
    try:
        if kind == "convergence_curve":
            for label, (it, d) in data.items():
                if isinstance(label, tuple):
                    label = f"{label[0]} ({_fmt(label[1])})" if len(data) > 3 else label[0]
                ax.semilogy(it, d, label=str(label), linewidth=1.2,
                            marker="o" if len(it) == 1 else None)
            ax.set_xlabel("iteration")
            ax.set_ylabel("mean relative distortion")
        elif kind == "iterations_bar":
            rows = list(data)
            labels = [f"{r.method}\n{r.swept_param}={_fmt(r.swept_value)}" for r in rows]
            x = np.arange(len(rows))
            ax.bar(x - 0.2, [r.mean_convergence_iter for r in rows], 0.4, label="iterations")
            ax.bar(x + 0.2, [r.mean_pilots for r in rows], 0.4, label="transmitted pilots")
            ax.set_xticks(x, labels, fontsize=7)
            ax.set_ylabel("count to convergence")
        else:
            for method, rows in _by_method(data).items():
                xs = [r.swept_value for r in rows]
                ys = [r.mean_distortion for r in rows]
                ax.plot(xs, ys, marker="o", label=method)
            ax.set_yscale("log")
            if kind == "distortion_vs_noise":
                ax.set_xscale("log")
                ax.set_xlabel("noise variance")
            else:
                ax.set_xlabel("number of nonzero taps k")
            ax.set_ylabel("mean relative distortion")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OSError(f"cannot write plot {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def write_outputs(result: ExperimentResult, out_dir=None) -> dict:
    """Write the full run directory and return the paths written.

    Layout: ``results.csv``, ``curves.csv``, ``config.resolved.yaml``,
    ``timing.csv``, ``failures.json`` (only when trials failed),
    ``trajectories/<method>__<value>.npy`` (trials x points) with
    ``trajectories/index.json``, and one SVG per applicable figure kind.
    """
    cfg = result.config
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    paths["results"] = emit_csv(result.rows, out / "results.csv")
    paths["curves"] = emit_curves(result, out / "curves.csv")
    cfg.dump(out / "config.resolved.yaml")
    paths["config"] = out / "config.resolved.yaml"

    tdir = out / "trajectories"
    tdir.mkdir(exist_ok=True)
    index = []
    for s in result.summaries:
        if s.trajectories is None or s.method == "compressive_plus_recovery":
            continue
        name = f"{s.method}__{_fmt(s.swept_value)}.npy"
        np.save(tdir / name, s.trajectories)
        index.append({"file": name, "method": s.method, "swept_param": cfg.sweep_param,
                      "swept_value": s.swept_value, "record_stride": cfg.record_stride,
                      "seeds": s.seeds})
    (tdir / "index.json").write_text(json.dumps({"rng_algorithm": RNG_ALGORITHM, "arrays": index}, indent=1))

    trows, descriptor = timing_report(result)
    with (out / "timing.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("# " + descriptor,))
        w.writerow(("method", "swept_value", "trials", "wall_time_s", "per_iteration_us"))
        for t in trows:
            w.writerow((t.method, _fmt(t.swept_value), t.trials, _fmt(t.wall_time_s), _fmt(t.per_iteration_us)))
    paths["timing"] = out / "timing.csv"

    if result.failures:
        (out / "failures.json").write_text(json.dumps(result.failures, indent=1))
        paths["failures"] = out / "failures.json"

    plotted = [r for r in result.rows if not math.isnan(r.mean_distortion)]
    if plotted and len(cfg.sweep) > 1:
        kind = "distortion_vs_noise" if cfg.sweep_param == "noise_variance" else "distortion_vs_k"
        paths[kind] = emit_plot(plotted, kind, out / f"{kind}.svg")
    curves = read_curves(paths["curves"])
    if curves:
        paths["convergence_curve"] = emit_plot(curves, "convergence_curve", out / "convergence_curve.svg")
    bars = [r for r in result.rows if not math.isnan(r.mean_convergence_iter)
            and r.method != "compressive_plus_recovery"]
    if bars:
        paths["iterations_bar"] = emit_plot(bars, "iterations_bar", out / "iterations_bar.svg")
    return paths
