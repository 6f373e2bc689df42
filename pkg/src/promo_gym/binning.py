"""Five-bin categorical discretization of unit sales.

Bin boundaries sit at the 20th/40th/60th/80th nearest-rank percentiles
of the observed unit-sales multiset. Nearest rank keeps everything
integer and exactly reproducible: percentile p of n sorted values is
the value at 1-based rank ceil(p * n / 100).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import EmptySeries, ParseError, SchemaError

N_BINS = 5
_PERCENTILES = (20, 40, 60, 80)


@dataclass(frozen=True)
class BinningModel:
    """Fitted sales binning: 4 strictly increasing unit thresholds.

    Units at or below boundaries[b] (and above boundaries[b-1]) fall in
    bin b; units above the last boundary fall in the top bin. degenerate
    flags series with too few distinct values to support real cuts.
    """

    boundaries: tuple[int, int, int, int]
    fitted_on: int
    degenerate: bool = False
    k: int = N_BINS


def fit_bins(units: list[int]) -> BinningModel:
    """Fit the 5-bin model to a multiset of unit-sales values.

    When the nearest-rank cut points collide (fewer than 5 distinct
    values), the distinct cuts are kept and the remainder padded upward
    by one unit each, keeping boundaries strictly increasing; the model
    is flagged degenerate.
    """
    if not units:
        raise EmptySeries("cannot fit sales bins on an empty series")
    ordered = sorted(units)
    n = len(ordered)
    cuts = [ordered[math.ceil(p * n / 100) - 1] for p in _PERCENTILES]

    degenerate = len(set(cuts)) < len(cuts)
    if degenerate:
        distinct = sorted(set(cuts))
        while len(distinct) < len(_PERCENTILES):
            distinct.append(distinct[-1] + 1)
        cuts = distinct

    return BinningModel(
        boundaries=tuple(cuts),
        fitted_on=n,
        degenerate=degenerate,
    )


def assign_bin(model: BinningModel, units: int) -> int:
    """Map a non-negative unit count to its bin 0..4.

    The bin is the smallest index whose boundary is >= units; ties at a
    boundary fall in the lower bin, anything above the last boundary in
    the top bin.
    """
    for b, cut in enumerate(model.boundaries):
        if units <= cut:
            return b
    return N_BINS - 1


# --- day-of-week profile -----------------------------------------------------


@dataclass(frozen=True)
class ProfileCell:
    count: int
    total_units: int
    median_units: int | None  # lower median; None for empty cells


@dataclass(frozen=True)
class WeeklyProfile:
    """7 x 5 grid of per-(day-of-week, bin) sales summaries.

    days carries the per-day rollup (count, total, median across all
    bins); day d's total is days[d].total_units.
    """

    cells: tuple[tuple[ProfileCell, ...], ...]  # [day][bin]
    days: tuple[ProfileCell, ...]               # [day]


def _summarize(values: list[int]) -> ProfileCell:
    ordered = sorted(values)
    median = ordered[(len(ordered) - 1) // 2] if ordered else None
    return ProfileCell(len(ordered), sum(ordered), median)


def weekly_profile(series, model: BinningModel) -> WeeklyProfile:
    """Summarize a daily series per (day of week, sales bin).

    Medians use the lower-median convention on even counts, matching
    fit_bins' integer-exact arithmetic.
    """
    buckets: list[list[list[int]]] = [[[] for _ in range(N_BINS)] for _ in range(7)]
    for rec in series:
        buckets[rec.day_of_week][assign_bin(model, rec.units_sold)].append(
            rec.units_sold
        )

    cells = []
    days = []
    for day in range(7):
        cells.append(tuple(_summarize(buckets[day][b]) for b in range(N_BINS)))
        days.append(_summarize([u for b in range(N_BINS) for u in buckets[day][b]]))
    return WeeklyProfile(cells=tuple(cells), days=tuple(days))


# --- model document format ---------------------------------------------------


def model_to_json(model: BinningModel) -> str:
    return json.dumps(
        {
            "k": model.k,
            "boundaries": list(model.boundaries),
            "fitted_on": model.fitted_on,
            "degenerate": model.degenerate,
        },
        indent=1,
    )


def model_from_json(text: str) -> BinningModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    try:
        boundaries = tuple(int(b) for b in doc["boundaries"])
        model = BinningModel(
            boundaries=boundaries,
            fitted_on=int(doc["fitted_on"]),
            degenerate=bool(doc.get("degenerate", False)),
            k=int(doc.get("k", N_BINS)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad binning model document: {exc}") from exc
    if len(model.boundaries) != N_BINS - 1 or model.k != N_BINS:
        raise SchemaError("binning model must carry 4 boundaries for 5 bins")
    if any(b >= c for b, c in zip(model.boundaries, model.boundaries[1:])):
        raise SchemaError("binning boundaries must be strictly increasing")
    return model
