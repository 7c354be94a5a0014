"""Figures from bench CSV output.

Consumes the delimited files the bench harness writes; nothing here is
imported by the measurement path.  Figures land as PNG files in the
requested directory:

* ``dd_sizes.png``      node count against qubit count per sharing class,
                        with the classification guide curves;
* ``runtimes.png``      per-instance wall time;
* ``runtime_scatter.png`` and ``speedups.png`` when a baseline CSV is
                        given: instance-by-instance comparison and
                        speedup percentiles per sharing class.
"""

from __future__ import annotations

import csv
import math
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_CLASS_COLORS = {
    "high-sharing": "tab:green",
    "some-sharing": "tab:orange",
    "no-sharing": "tab:red",
    "": "tab:gray",
}


def _read_rows(path: str) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(
            line for line in fh if not line.startswith("#")))


def _save(fig, out_dir: str, name: str, written: list[str]):
    path = os.path.join(out_dir, name)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)


def _plot_sizes(rows: list[dict], out_dir: str, written: list[str]):
    ok = [r for r in rows if r["status"] == "ok" and r["nodes"]]
    if not ok:
        return
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for cls in sorted({r["sharing"] for r in ok}):
        pts = [(int(r["n"]), int(r["nodes"])) for r in ok
               if r["sharing"] == cls]
        ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=28,
                   label=cls or "unclassified",
                   color=_CLASS_COLORS.get(cls, "tab:blue"), alpha=0.8)
    ns = np.arange(2, max(int(r["n"]) for r in ok) + 1)
    ax.plot(ns, [n * math.log2(n) for n in ns], "k--", lw=1,
            label="n log2 n")
    ax.plot(ns, [0.9 * 2 ** n for n in ns], "k:", lw=1, label="0.9 * 2^n")
    ax.set_yscale("log")
    ax.set_xlabel("qubits")
    ax.set_ylabel("final nodes")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, out_dir, "dd_sizes.png", written)


def _plot_runtimes(rows: list[dict], out_dir: str, written: list[str]):
    ok = [r for r in rows if r["status"] == "ok" and r["seconds"]]
    if not ok:
        return
    ok.sort(key=lambda r: float(r["seconds"]))
    fig, ax = plt.subplots(figsize=(7, 4))
    colors = [_CLASS_COLORS.get(r["sharing"], "tab:blue") for r in ok]
    ax.bar(range(len(ok)), [float(r["seconds"]) for r in ok], color=colors)
    ax.set_xticks(range(len(ok)))
    ax.set_xticklabels([r["name"] for r in ok], rotation=90, fontsize=6)
    ax.set_ylabel("seconds")
    ax.set_yscale("log")
    fig.tight_layout()
    _save(fig, out_dir, "runtimes.png", written)


def _plot_baseline(rows: list[dict], baseline_path: str, out_dir: str,
                   written: list[str]):
    baseline = {r["name"]: r for r in _read_rows(baseline_path)}
    paired = []
    for r in rows:
        b = baseline.get(r["name"])
        if b is None:
            continue
        paired.append((r, b))
    if not paired:
        return
    fig, ax = plt.subplots(figsize=(5, 5))
    lo, hi = float("inf"), 0.0
    for r, b in paired:
        r_ok = r["status"] == "ok"
        b_ok = b["status"] == "ok"
        if not r_ok and not b_ok:
            continue
        # Timeouts sit on the plot border as open markers.
        x = float(b["seconds"]) if b_ok else None
        y = float(r["seconds"]) if r_ok else None
        fill = "full" if r_ok and b_ok else "none"
        if x and y:
            lo, hi = min(lo, x, y), max(hi, x, y)
        ax.plot([x or hi or 1.0], [y or hi or 1.0], marker="o",
                fillstyle=fill, color=_CLASS_COLORS.get(r["sharing"],
                                                        "tab:blue"))
    if lo < hi:
        ax.plot([lo, hi], [lo, hi], "k--", lw=1)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("baseline seconds")
    ax.set_ylabel("current seconds")
    fig.tight_layout()
    _save(fig, out_dir, "runtime_scatter.png", written)

    by_class: dict[str, list[float]] = {}
    for r, b in paired:
        if r["status"] == "ok" and b["status"] == "ok" \
                and float(r["seconds"]) > 0:
            cls = r["sharing"] or "all"
            by_class.setdefault(cls, []).append(
                float(b["seconds"]) / float(r["seconds"]))
    if not by_class:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    classes = sorted(by_class)
    width = 0.25
    for i, (pct, label) in enumerate([(50, "median"), (90, "P90"),
                                      (95, "P95")]):
        vals = [np.percentile(by_class[c], pct) for c in classes]
        ax.bar(np.arange(len(classes)) + (i - 1) * width, vals, width,
               label=label)
    ax.axhline(1.0, color="k", lw=1)
    ax.set_xticks(range(len(classes)))
    ax.set_xticklabels(classes)
    ax.set_ylabel("speedup vs baseline")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, out_dir, "speedups.png", written)


def render_bench_figures(csv_path: str, out_dir: str,
                         baseline_path: str | None = None) -> list[str]:
    """Render every applicable figure; returns the written file paths."""
    rows = _read_rows(csv_path)
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    _plot_sizes(rows, out_dir, written)
    _plot_runtimes(rows, out_dir, written)
    if baseline_path:
        _plot_baseline(rows, baseline_path, out_dir, written)
    return written
