"""Figures written next to the CLI reports.  Uses the Agg backend only, so
nothing ever needs a display."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .corpus import state_record  # noqa: E402

LEVEL_COLORS = {"HIGH": "#2b8a3e", "MED": "#e8a317", "LOW": "#c92a2a"}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # no version stamp, so repeated renders are byte-identical
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_level_counts(counts: Mapping[str, int], title: str, path) -> Path:
    levels = [lv for lv in ("HIGH", "MED", "LOW") if lv in counts]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    bars = ax.bar(levels, [counts[lv] for lv in levels], color=[LEVEL_COLORS[lv] for lv in levels])
    for bar, lv in zip(bars, levels):
        ax.annotate(str(counts[lv]), (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                    ha="center", va="bottom")
    ax.set_ylabel("PBTs")
    ax.set_title(title)
    ax.set_ylim(0, max([1] + list(counts.values())) * 1.2)
    return _save(fig, path)


def plot_relevance(precision, recall, path) -> Path:
    names, values = [], []
    for name, value in (("precision", precision), ("recall", recall)):
        names.append(name)
        values.append(0.0 if value is None else float(value))
    fig, ax = plt.subplots(figsize=(4, 3.2))
    bars = ax.bar(names, values, color=["#1971c2", "#5f3dc4"])
    for bar, value in zip(bars, values):
        ax.annotate(f"{value:.4f}", (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                    ha="center", va="bottom")
    ax.set_ylim(0, 1.1)
    ax.set_title("Property relevance")
    return _save(fig, path)


def plot_cells(hits: Mapping[str, int], title: str, path) -> Path:
    names = list(hits)
    fig, ax = plt.subplots(figsize=(max(4, 0.9 * len(names)), 3.2))
    ax.bar(range(len(names)), [hits[n] for n in names], color="#1971c2")
    ax.set_xticks(range(len(names)), names, rotation=30, ha="right")
    ax.set_ylabel("inputs")
    ax.set_title(title)
    return _save(fig, path)


def plot_guard_trace(trace: Sequence, events: Sequence, fields: Sequence[str], path, title: str = "") -> Path:
    """One line per numeric field over ticks; alert ticks are marked."""
    records = [state_record(s) for s in trace]
    ticks = [r["tick"] for r in records]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for name in fields:
        values = [r.get(name) for r in records]
        if all(isinstance(v, (int, float)) for v in values):
            ax.plot(ticks, [float(v) for v in values], marker=".", label=name)
    for tick in sorted({e.tick for e in events}):
        ax.axvline(tick, color="#c92a2a", linestyle="--", linewidth=1)
    ax.set_xlabel("tick")
    ax.set_title(title or "monitored trace")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize="small")
    return _save(fig, path)
