"""Benchmark report figures: ARI and timing bars by series length.

Rendered headlessly to files next to the delimited report output.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("Agg")

matplotlib.rcParams.update(
    {
        "figure.figsize": (7.0, 4.3),
        "figure.dpi": 130,
        "savefig.bbox": "tight",
        "axes.grid": True,
        "grid.alpha": 0.3,
        "axes.axisbelow": True,
        "legend.fontsize": 9,
        "axes.labelsize": 11,
    }
)

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _length_label(n: int) -> str:
    exponent = int(np.log2(n))
    return f"$2^{{{exponent}}}$" if 2**exponent == n else str(n)


def _grouped_bars(ax, report, value_key, err_key=None):
    measures = sorted({measure for measure, _ in report.cells})
    lengths = sorted({length for _, length in report.cells})
    positions = np.arange(len(lengths), dtype=float)
    width = 0.8 / len(measures)
    for i, measure in enumerate(measures):
        offsets = positions + (i - (len(measures) - 1) / 2.0) * width
        heights, errors = [], []
        for length in lengths:
            stats = report.cells.get((measure, length), {})
            heights.append(stats.get(value_key, np.nan))
            errors.append(stats.get(err_key, 0.0) if err_key else 0.0)
        ax.bar(offsets, heights, width=width * 0.92, yerr=errors if err_key else None,
               capsize=2, label=measure)
    ax.set_xticks(positions)
    ax.set_xticklabels([_length_label(n) for n in lengths])
    ax.set_xlabel("series length")
    ax.legend(ncols=3, loc="upper center", bbox_to_anchor=(0.5, 1.17))
    return measures, lengths


def ari_figure(report, path) -> Path:
    """Grouped ARI bars per measure and length, with std error bars."""
    fig, ax = plt.subplots()
    _grouped_bars(ax, report, "ari_mean", "ari_std")
    ax.set_ylabel("ARI")
    ax.set_ylim(-0.15, 1.15)
    ax.axhline(0.0, color="black", linewidth=0.8)
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def timing_figure(report, path) -> Path:
    """Mean wall-clock seconds per measure and length on a log scale."""
    fig, ax = plt.subplots()
    _grouped_bars(ax, report, "seconds_mean")
    ax.set_ylabel("seconds (matrix + clustering)")
    ax.set_yscale("log")
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def render_report(report, directory) -> list:
    """Write the ARI and timing figures for a report; return the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [
        ari_figure(report, directory / "ari_by_length.png"),
        timing_figure(report, directory / "timing_by_length.png"),
    ]
