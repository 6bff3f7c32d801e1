"""Static SVG line plots.

Output is byte-stable: the SVG id salt is fixed and the date stamp dropped.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {"svg.hashsalt": "quake-lab", "svg.fonttype": "path", "font.size": 9}


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def plot_series(path, series, xlabel: str, ylabel: str, title: str = "", logy: bool = False) -> None:
    """One polyline per (label, xs, ys) entry."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.5))
        for label, xs, ys in series:
            ax.plot(xs, ys, marker=".", linewidth=1.0, label=label)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend(fontsize=7)
        fig.tight_layout()
        _save(fig, path)


def plot_flow(path, ts, values, curve: str) -> None:
    plot_series(path, [(curve, ts, values)], "twist parameter t", "length functional", f"twist flow along {curve}")


def plot_convergence(path, report) -> None:
    series = []
    for i, s in enumerate(report.starts):
        its = list(range(len(s.trajectory)))
        gn = [max(g, 1e-17) for _, _, g in s.trajectory]
        series.append((f"start {i}", its, gn))
    plot_series(path, series, "iteration", "gradient norm", "convergence per start", logy=True)
