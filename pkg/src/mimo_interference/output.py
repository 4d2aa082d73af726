"""CSV and SVG emission of experiment results."""

import csv
import io
from pathlib import Path

import numpy as np

from .experiments import HeatmapGrid, OipResult, RocCurve
from .theory import DetectionCurve

ROC_COLUMNS = ("detector", "gamma", "pfa_theory", "pfa_empirical", "pd_theory", "pd_empirical", "ci_halfwidth")
OIP_COLUMNS = ("detector", "run", "angle_deg", "range_m", "oip_db")
THEORY_COLUMNS = ("detector", "lambda", "gamma", "pfa", "pd")
FORMATS = ("csv", "svg")


def _fmt(x):
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def _write_rows(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header is not None:
        w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def roc_rows(curves):
    for c in curves:
        for i in range(len(c.gamma)):
            yield (c.detector, c.gamma[i], c.pfa_theory[i], c.pfa_empirical[i],
                   c.pd_theory[i], c.pd_empirical[i], c.ci_halfwidth[i])


def read_roc_csv(path):
    """Load a ROC CSV back into ``{column: list}`` (numeric columns as floats)."""
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    return {
        k: [r[k] if k == "detector" else float(r[k]) for r in rows] for k in ROC_COLUMNS
    }


def _svg_setup():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "mimo-interference"
    matplotlib.rcParams["svg.fonttype"] = "none"
    return plt


def _save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})


def _roc_svg(curves, path):
    plt = _svg_setup()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for c in curves:
        label = f"{c.detector} (INR {c.inr_db:g} dB)"
        line, = ax.plot(c.pfa_theory, c.pd_theory, "-", label=f"{label} theory")
        ax.plot(c.pfa_empirical, c.pd_empirical, "o", ms=3, color=line.get_color(), label=f"{label} MC")
    ax.set_xscale("log")
    ax.set_xlabel("probability of false alarm")
    ax.set_ylabel("probability of detection")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=6)
    _save_svg(fig, path)
    plt.close(fig)


def _heatmap_svg(grid, path):
    plt = _svg_setup()
    fig, ax = plt.subplots(figsize=(5, 4.5))
    if len(grid.range_bins) == 1:
        ax.plot(grid.angles, grid.values_db[0])
        ax.set_xlabel("angle (deg)")
        ax.set_ylabel("statistic (dB)")
    else:
        m = ax.pcolormesh(grid.angles, grid.range_bins, grid.values_db, shading="nearest")
        fig.colorbar(m, ax=ax, label="statistic (dB)")
        ax.set_xlabel("angle (deg)")
        ax.set_ylabel("range bin")
    ax.set_title(f"{grid.detector}, Doppler bin {grid.doppler_bin}")
    _save_svg(fig, path)
    plt.close(fig)


def _oip_svg(result, path):
    plt = _svg_setup()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for d in result.detectors:
        v = np.sort(result.values(d))
        ax.step(v, np.arange(1, v.size + 1) / v.size, where="post", label=d)
    ax.set_xlabel("output interference power (dB)")
    ax.set_ylabel("CDF")
    ax.grid(True, alpha=0.3)
    ax.legend()
    _save_svg(fig, path)
    plt.close(fig)


def emit(results, fmt, path):
    """
    Write results as CSV or SVG.

    ``results`` is a list of ``RocCurve`` (one CSV per INR when several are
    present, suffixed ``_inr<value>dB``), a list of ``HeatmapGrid`` (one
    file per detector, ``path`` is then a directory or a filename stem), an
    ``OipResult`` or a list of ``DetectionCurve``.

    Returns
    -------
    list of Path
        Files written.
    """
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    path = Path(path)
    items = results if isinstance(results, (list, tuple)) else [results]
    if isinstance(results, OipResult):
        if fmt == "csv":
            _write_rows(path, OIP_COLUMNS, (
                (s.detector, s.run, s.angle_deg, s.range_m, s.oip_db) for s in results.samples
            ))
        else:
            _oip_svg(results, path)
        return [path]
    if items and isinstance(items[0], RocCurve):
        if fmt == "svg":
            _roc_svg(items, path)
            return [path]
        inrs = sorted({c.inr_db for c in items})
        if len(inrs) == 1:
            _write_rows(path, ROC_COLUMNS, roc_rows(items))
            return [path]
        # the column schema has no INR field: one file per INR
        out = []
        for inr in inrs:
            p = path.with_name(f"{path.stem}_inr{inr:g}dB{path.suffix}")
            _write_rows(p, ROC_COLUMNS, roc_rows([c for c in items if c.inr_db == inr]))
            out.append(p)
        return out
    if items and isinstance(items[0], DetectionCurve):
        if fmt == "csv":
            _write_rows(path, THEORY_COLUMNS, (
                (c.detector, c.lam, g, p, q) for c in items for g, p, q in zip(c.gamma_grid, c.pfa, c.pd)
            ))
        else:
            plt = _svg_setup()
            fig, ax = plt.subplots(figsize=(6, 4.5))
            for c in items:
                ax.plot(c.pfa, c.pd, label=f"{c.detector} (lambda={c.lam:.3g})")
            ax.set_xscale("log")
            ax.set_xlabel("probability of false alarm")
            ax.set_ylabel("probability of detection")
            ax.legend(fontsize=7)
            _save_svg(fig, path)
            plt.close(fig)
        return [path]
    if items and isinstance(items[0], HeatmapGrid):
        out = []
        base = path if path.suffix == "" else path.with_suffix("")
        if path.suffix == "":
            base.mkdir(parents=True, exist_ok=True)
            stem = base / "heatmap"
        else:
            stem = base
        for g in items:
            p = Path(f"{stem}_{g.detector}.{fmt}")
            if fmt == "csv":
                _write_rows(p, None, [list(g.angles)] + [list(r) for r in g.values_db])
            else:
                _heatmap_svg(g, p)
            out.append(p)
        return out
    raise TypeError(f"cannot emit results of type {type(results).__name__}")
