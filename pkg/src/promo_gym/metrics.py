"""Reward-curve metrics over episode traces, plus their CSV/SVG emitters.

Two series summarize a training run:

  mean cumulative reward -- at step t, the mean over all episodes of
      the running reward total after t steps; episodes shorter than t
      carry their final total forward so every episode keeps weighing in.
  episodic reward -- each episode's total reward, in training order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .errors import EmptyInput
from .learner import EpisodeTrace, TraceStep


@dataclass
class MetricsSeries:
    mean_cumulative: list[tuple[int, float]]  # (step index from 1, mean)
    episodic: list[tuple[int, float]]         # (episode index from 0, total)


def compute_metrics(traces: list[EpisodeTrace]) -> MetricsSeries:
    """Carry-forward mean cumulative curve plus per-episode totals."""
    if not traces:
        raise EmptyInput("no traces to compute metrics over")
    horizon = max(len(t.cumulative) for t in traces)
    grid = np.empty((len(traces), horizon))
    for i, trace in enumerate(traces):
        n = len(trace.cumulative)
        grid[i, :n] = trace.cumulative
        grid[i, n:] = trace.cumulative[-1]
    means = grid.mean(axis=0)
    return MetricsSeries(
        mean_cumulative=[(t + 1, float(means[t])) for t in range(horizon)],
        episodic=[(i, trace.total_reward) for i, trace in enumerate(traces)],
    )


# --- CSV emission --------------------------------------------------------------


def write_mean_cumulative_csv(target: str | Path | TextIO,
                              series: MetricsSeries) -> None:
    _write_rows(target, ["step", "mean_cumulative_reward"],
                ((str(step), repr(value)) for step, value in series.mean_cumulative))


def write_episodic_csv(target: str | Path | TextIO, series: MetricsSeries) -> None:
    _write_rows(target, ["episode", "total_reward"],
                ((str(ep), repr(total)) for ep, total in series.episodic))


def write_trace_csv(target: str | Path | TextIO, trace: EpisodeTrace) -> None:
    _write_rows(target, ["step", "state", "action", "reward", "next_state", "done"],
                ((str(i + 1), str(s.state), str(s.action), repr(s.reward),
                  str(s.next_state), "true" if s.done else "false")
                 for i, s in enumerate(trace.steps)))


def read_trace_csv(source: str | Path | TextIO) -> EpisodeTrace:
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as handle:
            return read_trace_csv(handle)
    reader = csv.reader(source)
    header = next(reader, None)
    if header != ["step", "state", "action", "reward", "next_state", "done"]:
        raise EmptyInput(f"not a trace file: header {header}")
    steps = []
    cumulative = []
    total = 0.0
    for row in reader:
        if not row:
            continue
        step = TraceStep(
            state=int(row[1]),
            action=int(row[2]),
            reward=float(row[3]),
            next_state=int(row[4]),
            done=row[5] == "true",
        )
        steps.append(step)
        total += step.reward
        cumulative.append(total)
    done = bool(steps) and steps[-1].done
    return EpisodeTrace(steps=steps, cumulative=cumulative, total_reward=total,
                        truncated=not done)


def _write_rows(target: str | Path | TextIO, header: list[str], rows) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as handle:
            _write_rows(handle, header, rows)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


# --- self-contained SVG line chart ----------------------------------------------
# The CSVs are the testable ground truth; the chart is a convenience view
# written without any plotting dependency.

_SVG_W, _SVG_H, _MARGIN = 640, 360, 48


def write_line_chart_svg(target: str | Path, points: list[tuple[float, float]],
                         title: str, x_label: str, y_label: str) -> None:
    if not points:
        raise EmptyInput("no points to chart")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0
    plot_w = _SVG_W - 2 * _MARGIN
    plot_h = _SVG_H - 2 * _MARGIN

    def sx(x: float) -> float:
        return _MARGIN + (x - x_lo) / x_span * plot_w

    def sy(y: float) -> float:
        return _SVG_H - _MARGIN - (y - y_lo) / y_span * plot_h

    poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_SVG_W / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
        f'<line x1="{_MARGIN}" y1="{_SVG_H - _MARGIN}" x2="{_SVG_W - _MARGIN}" '
        f'y2="{_SVG_H - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_SVG_H - _MARGIN}" stroke="black"/>',
        f'<text x="{_SVG_W / 2:.0f}" y="{_SVG_H - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_label}</text>',
        f'<text x="14" y="{_SVG_H / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 14 {_SVG_H / 2:.0f})">{y_label}</text>',
        f'<text x="{_MARGIN}" y="{_SVG_H - _MARGIN + 16}" font-family="sans-serif" '
        f'font-size="10">{x_lo:g}</text>',
        f'<text x="{_SVG_W - _MARGIN}" y="{_SVG_H - _MARGIN + 16}" '
        f'text-anchor="end" font-family="sans-serif" font-size="10">{x_hi:g}</text>',
        f'<text x="{_MARGIN - 4}" y="{_SVG_H - _MARGIN}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{y_lo:g}</text>',
        f'<text x="{_MARGIN - 4}" y="{_MARGIN + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{y_hi:g}</text>',
        f'<polyline points="{poly}" fill="none" stroke="#2266cc" stroke-width="1.5"/>',
        "</svg>",
    ]
    Path(target).write_text("\n".join(parts) + "\n", encoding="utf-8")
