"""Render experiment result rows to a figure next to the CSV output."""
from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["render_rows"]

_ERRORISH = ("sber", "sqer", "per", "mer")


def _is_error_metric(name: str) -> bool:
    return any(name.startswith(tag) for tag in _ERRORISH)


def render_rows(rows, path):
    """One PNG per result set: error-rate curves on a log axis, densities linear."""
    rows = list(rows)
    if not rows:
        raise ValueError("nothing to plot")
    preset = rows[0].preset
    fig, ax = plt.subplots(figsize=(6.4, 4.2))

    if preset == "fig7" or all(r.metric == "sqer_model" for r in rows if r.metric != "s_one_percent"):
        curves = defaultdict(list)
        for row in rows:
            if row.metric == "sqer_model" and row.r is not None:
                curves[row.c].append((row.r * row.c, row.value))
        for c, points in sorted(curves.items()):
            points.sort()
            ax.semilogy([x for x, _ in points], [max(y, 1e-12) for _, y in points],
                        marker="o", label=f"c = {c}")
        ax.set_xlabel("anticipation degree x pattern order (r c)")
        ax.set_ylabel("sequence error rate (model)")
    elif preset == "table1" or all(r.metric in ("s_capacity", "efficiency") for r in rows):
        labels, values = [], []
        for row in rows:
            if row.metric == "efficiency":
                labels.append(f"chi={row.chi}\nl={row.l}, r={row.r}")
                values.append(row.value * 100.0)
        ax.bar(range(len(values)), values)
        ax.set_xticks(range(len(labels)), labels, fontsize=7)
        ax.set_ylabel("efficiency at 1% error (%)")
    else:
        series = defaultdict(list)
        for row in rows:
            if row.S is not None:
                series[row.metric].append((row.S, row.value, row.stderr))
        for metric, points in sorted(series.items()):
            points.sort()
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            errs = [p[2] for p in points]
            if any(errs):
                ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=2, label=metric)
            else:
                ax.plot(xs, ys, marker=".", linestyle="--", label=metric)
        if all(y > 0 for pts in series.values() for _, y, _ in pts):
            ax.set_yscale("log")
        ax.set_xlabel("stored sequences S")
        ax.set_ylabel("metric value")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    ax.set_title(preset)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
