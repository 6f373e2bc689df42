"""Retail CSV ingestion: promotion plans, transactions, holiday calendars.

Three input schemas (exact comma-separated headers, ISO-8601 dates,
UTF-8, LF or CRLF):

    promo plan   promo_code,promo_type,event_id,promo_start_date,
                 promo_end_date,promo_target_amount,store_id,ad_id,
                 product_id,offer_qty,offer_price,planogram_change,
                 special_package,ad_location,coupon
    online txns  product_id,date,eod_sales_qty,eod_return_qty,zip,city,
                 state,geo_area_code
    rx txns      store_id,product_id,date,eod_sales_qty,qty_uom
    holidays     date,state_holiday,school_holiday

Parsing is strict by default: the first bad row aborts with its row
number. Lenient mode skips bad rows and reports them as diagnostics.
unify() folds everything into one dense daily series per
store-product, zero-filling gaps inside each pair's observed span.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Iterator, TextIO

from .errors import CalendarGap, HeaderMismatch, RowError

PROMO_PLAN_HEADER = [
    "promo_code", "promo_type", "event_id", "promo_start_date", "promo_end_date",
    "promo_target_amount", "store_id", "ad_id", "product_id", "offer_qty",
    "offer_price", "planogram_change", "special_package", "ad_location", "coupon",
]
ONLINE_HEADER = [
    "product_id", "date", "eod_sales_qty", "eod_return_qty", "zip", "city",
    "state", "geo_area_code",
]
RX_HEADER = ["store_id", "product_id", "date", "eod_sales_qty", "qty_uom"]
HOLIDAY_HEADER = ["date", "state_holiday", "school_holiday"]
ZIP_STORE_HEADER = ["zip", "store_id"]

ONLINE_STORE_ID = "ONLINE"  # fallback store for online rows without a zip mapping

_TRUE = {"y", "1", "true"}
_FALSE = {"n", "0", "false"}


@dataclass(frozen=True)
class PromoPlanRecord:
    promo_code: str
    promo_type: str
    event_id: str
    promo_start_date: date
    promo_end_date: date
    promo_target_amount: float
    store_id: str
    ad_id: str
    product_id: str
    offer_qty: int
    offer_price: float
    planogram_change: bool
    special_package: bool
    ad_location: bool
    coupon: bool


@dataclass(frozen=True)
class OnlineTxnRecord:
    product_id: str
    date: date
    eod_sales_qty: int
    eod_return_qty: int
    zip: str
    city: str
    state: str
    geo_area_code: str


@dataclass(frozen=True)
class RxTxnRecord:
    store_id: str
    product_id: str
    date: date
    eod_sales_qty: int
    qty_uom: str


@dataclass(frozen=True)
class DailySalesRecord:
    """One store-product-day of the unified series. day_of_week: 0 = Monday."""

    store_id: str
    product_id: str
    date: date
    day_of_week: int
    units_sold: int
    promo_active: bool
    state_holiday: bool
    school_holiday: bool


# --- field parsers -----------------------------------------------------------


def _parse_date(text: str, row: int, name: str) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise RowError(f"{name}: {text!r} is not an ISO-8601 date", row) from None


def _parse_bool(text: str, row: int, name: str) -> bool:
    lowered = text.strip().casefold()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise RowError(f"{name}: {text!r} is not a boolean (Y/N/1/0/true/false)", row)


def _parse_nonneg_int(text: str, row: int, name: str) -> int:
    try:
        value = int(text.strip())
    except ValueError:
        raise RowError(f"{name}: {text!r} is not an integer", row) from None
    if value < 0:
        raise RowError(f"{name}: {value} is negative", row)
    return value


def _parse_nonneg_float(text: str, row: int, name: str) -> float:
    try:
        value = float(text.strip())
    except ValueError:
        raise RowError(f"{name}: {text!r} is not a number", row) from None
    if value < 0:
        raise RowError(f"{name}: {value} is negative", row)
    return value


# --- CSV plumbing ------------------------------------------------------------


def _open_rows(source: str | Path | TextIO, expected: list[str]):
    """Yield (row_number, row) pairs after checking the header row."""
    if isinstance(source, (str, Path)):
        handle: TextIO = open(source, newline="", encoding="utf-8")
        name = str(source)
        own = True
    else:
        handle = source
        name = getattr(source, "name", "<stream>")
        own = False

    def rows() -> Iterator[tuple[int, list[str]]]:
        try:
            reader = csv.reader(handle)
            try:
                header = next(reader)
            except StopIteration:
                raise HeaderMismatch(f"{name}: file is empty, expected header "
                                     f"{','.join(expected)}") from None
            if [h.strip() for h in header] != expected:
                raise HeaderMismatch(
                    f"{name}: header {','.join(header)!r} does not match "
                    f"expected {','.join(expected)!r}"
                )
            for i, row in enumerate(reader, start=2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                yield i, row
        finally:
            if own:
                handle.close()

    return rows()


def _run_rows(rows, expected_len: int, build, strict: bool,
              diagnostics: list[str] | None):
    records = []
    for row_num, row in rows:
        try:
            if len(row) != expected_len:
                raise RowError(
                    f"expected {expected_len} fields, got {len(row)}", row_num
                )
            records.append(build(row_num, row))
        except RowError as exc:
            if strict:
                raise
            if diagnostics is not None:
                diagnostics.append(str(exc))
    return records


# --- public parsers ----------------------------------------------------------


def parse_promo_plan(source: str | Path | TextIO, strict: bool = True,
                     diagnostics: list[str] | None = None) -> list[PromoPlanRecord]:
    """Parse the promotion-plan schema; validates start <= end per row."""

    def build(row_num: int, row: list[str]) -> PromoPlanRecord:
        rec = PromoPlanRecord(
            promo_code=row[0].strip(),
            promo_type=row[1].strip(),
            event_id=row[2].strip(),
            promo_start_date=_parse_date(row[3], row_num, "promo_start_date"),
            promo_end_date=_parse_date(row[4], row_num, "promo_end_date"),
            promo_target_amount=_parse_nonneg_float(row[5], row_num,
                                                    "promo_target_amount"),
            store_id=row[6].strip(),
            ad_id=row[7].strip(),
            product_id=row[8].strip(),
            offer_qty=_parse_nonneg_int(row[9], row_num, "offer_qty"),
            offer_price=_parse_nonneg_float(row[10], row_num, "offer_price"),
            planogram_change=_parse_bool(row[11], row_num, "planogram_change"),
            special_package=_parse_bool(row[12], row_num, "special_package"),
            ad_location=_parse_bool(row[13], row_num, "ad_location"),
            coupon=_parse_bool(row[14], row_num, "coupon"),
        )
        if rec.promo_start_date > rec.promo_end_date:
            raise RowError(
                f"promo_start_date {rec.promo_start_date} after promo_end_date "
                f"{rec.promo_end_date}", row_num,
            )
        return rec

    rows = _open_rows(source, PROMO_PLAN_HEADER)
    return _run_rows(rows, len(PROMO_PLAN_HEADER), build, strict, diagnostics)


def parse_transactions(source: str | Path | TextIO, kind: str, strict: bool = True,
                       diagnostics: list[str] | None = None):
    """Parse transactions of the given kind: 'online' or 'rx'."""
    if kind == "online":
        def build(row_num: int, row: list[str]) -> OnlineTxnRecord:
            return OnlineTxnRecord(
                product_id=row[0].strip(),
                date=_parse_date(row[1], row_num, "date"),
                eod_sales_qty=_parse_nonneg_int(row[2], row_num, "eod_sales_qty"),
                eod_return_qty=_parse_nonneg_int(row[3], row_num, "eod_return_qty"),
                zip=row[4].strip(),
                city=row[5].strip(),
                state=row[6].strip(),
                geo_area_code=row[7].strip(),
            )

        rows = _open_rows(source, ONLINE_HEADER)
        return _run_rows(rows, len(ONLINE_HEADER), build, strict, diagnostics)

    if kind == "rx":
        def build(row_num: int, row: list[str]) -> RxTxnRecord:
            if not row[4].strip():
                raise RowError("qty_uom: missing unit of measure", row_num)
            return RxTxnRecord(
                store_id=row[0].strip(),
                product_id=row[1].strip(),
                date=_parse_date(row[2], row_num, "date"),
                eod_sales_qty=_parse_nonneg_int(row[3], row_num, "eod_sales_qty"),
                qty_uom=row[4].strip(),
            )

        rows = _open_rows(source, RX_HEADER)
        return _run_rows(rows, len(RX_HEADER), build, strict, diagnostics)

    raise ValueError(f"unknown transaction kind {kind!r}, expected 'online' or 'rx'")


def parse_zip_store_map(source: str | Path | TextIO) -> dict[str, str]:
    """Parse the optional zip -> store mapping used to place online rows."""

    def build(row_num: int, row: list[str]):
        return row[0].strip(), row[1].strip()

    rows = _open_rows(source, ZIP_STORE_HEADER)
    return dict(_run_rows(rows, len(ZIP_STORE_HEADER), build, strict=True,
                          diagnostics=None))


def parse_holidays(source: str | Path | TextIO, strict: bool = True,
                   diagnostics: list[str] | None = None) -> dict[date, tuple[bool, bool]]:
    """Parse the holiday calendar into date -> (state_holiday, school_holiday)."""

    def build(row_num: int, row: list[str]):
        return (
            _parse_date(row[0], row_num, "date"),
            _parse_bool(row[1], row_num, "state_holiday"),
            _parse_bool(row[2], row_num, "school_holiday"),
        )

    rows = _open_rows(source, HOLIDAY_HEADER)
    triples = _run_rows(rows, len(HOLIDAY_HEADER), build, strict, diagnostics)
    return {day: (state, school) for day, state, school in triples}


# --- unification -------------------------------------------------------------


def unify(online: list[OnlineTxnRecord], rx: list[RxTxnRecord],
          promos: list[PromoPlanRecord], holidays: dict[date, tuple[bool, bool]],
          zip_store_map: dict[str, str] | None = None) -> list[DailySalesRecord]:
    """Fold transactions into one dense daily series per store-product.

    Online rows carry no store: they join through the optional
    zip -> store mapping, or aggregate under the virtual ONLINE store.
    Dates missing inside a pair's observed span are zero-filled so
    downstream profiles and grids see a dense series. Holiday flags come
    from the calendar; a series date outside the calendar's span raises
    CalendarGap. Output is sorted by (store, product, date).
    """
    zip_store_map = zip_store_map or {}
    units: dict[tuple[str, str, date], int] = {}
    for txn in rx:
        key = (txn.store_id, txn.product_id, txn.date)
        units[key] = units.get(key, 0) + txn.eod_sales_qty
    for txn in online:
        store = zip_store_map.get(txn.zip, ONLINE_STORE_ID)
        key = (store, txn.product_id, txn.date)
        units[key] = units.get(key, 0) + txn.eod_sales_qty

    spans: dict[tuple[str, str], tuple[date, date]] = {}
    for store, product, day in units:
        lo, hi = spans.get((store, product), (day, day))
        spans[(store, product)] = (min(lo, day), max(hi, day))

    cal_lo = min(holidays) if holidays else None
    cal_hi = max(holidays) if holidays else None

    out: list[DailySalesRecord] = []
    for (store, product) in sorted(spans):
        lo, hi = spans[(store, product)]
        day = lo
        while day <= hi:
            if cal_lo is None or not (cal_lo <= day <= cal_hi):
                raise CalendarGap(
                    f"{day.isoformat()} is outside the holiday calendar span"
                    + (f" {cal_lo.isoformat()}..{cal_hi.isoformat()}" if cal_lo else "")
                )
            state_hol, school_hol = holidays.get(day, (False, False))
            out.append(DailySalesRecord(
                store_id=store,
                product_id=product,
                date=day,
                day_of_week=day.weekday(),
                units_sold=units.get((store, product, day), 0),
                promo_active=any(
                    p.store_id == store and p.product_id == product
                    and p.promo_start_date <= day <= p.promo_end_date
                    for p in promos
                ),
                state_holiday=state_hol,
                school_holiday=school_hol,
            ))
            day += timedelta(days=1)
    return out


# --- CSV writers (round-trip partners of the parsers) -------------------------


def _write_csv(target: str | Path | TextIO, header: list[str],
               rows: Iterator[list[str]]) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as handle:
            _write_csv(handle, header, rows)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


def write_promo_plan(target: str | Path | TextIO,
                     records: list[PromoPlanRecord]) -> None:
    _write_csv(target, PROMO_PLAN_HEADER, (
        [r.promo_code, r.promo_type, r.event_id, r.promo_start_date.isoformat(),
         r.promo_end_date.isoformat(), repr(r.promo_target_amount), r.store_id,
         r.ad_id, r.product_id, str(r.offer_qty), repr(r.offer_price),
         _fmt_bool(r.planogram_change), _fmt_bool(r.special_package),
         _fmt_bool(r.ad_location), _fmt_bool(r.coupon)]
        for r in records
    ))


def write_transactions(target: str | Path | TextIO, records, kind: str) -> None:
    if kind == "online":
        _write_csv(target, ONLINE_HEADER, (
            [r.product_id, r.date.isoformat(), str(r.eod_sales_qty),
             str(r.eod_return_qty), r.zip, r.city, r.state, r.geo_area_code]
            for r in records
        ))
    elif kind == "rx":
        _write_csv(target, RX_HEADER, (
            [r.store_id, r.product_id, r.date.isoformat(), str(r.eod_sales_qty),
             r.qty_uom]
            for r in records
        ))
    else:
        raise ValueError(f"unknown transaction kind {kind!r}")


# --- unified series document ---------------------------------------------------

SERIES_HEADER = [
    "store_id", "product_id", "date", "day_of_week", "units_sold",
    "promo_active", "state_holiday", "school_holiday",
]


def write_daily_series(target: str | Path | TextIO,
                       series: list[DailySalesRecord]) -> None:
    _write_csv(target, SERIES_HEADER, (
        [r.store_id, r.product_id, r.date.isoformat(), str(r.day_of_week),
         str(r.units_sold), _fmt_bool(r.promo_active), _fmt_bool(r.state_holiday),
         _fmt_bool(r.school_holiday)]
        for r in series
    ))


def read_daily_series(source: str | Path | TextIO) -> list[DailySalesRecord]:
    def build(row_num: int, row: list[str]) -> DailySalesRecord:
        day = _parse_date(row[2], row_num, "date")
        dow = _parse_nonneg_int(row[3], row_num, "day_of_week")
        if dow != day.weekday():
            raise RowError(
                f"day_of_week {dow} does not match {day.isoformat()}", row_num
            )
        return DailySalesRecord(
            store_id=row[0].strip(),
            product_id=row[1].strip(),
            date=day,
            day_of_week=dow,
            units_sold=_parse_nonneg_int(row[4], row_num, "units_sold"),
            promo_active=_parse_bool(row[5], row_num, "promo_active"),
            state_holiday=_parse_bool(row[6], row_num, "state_holiday"),
            school_holiday=_parse_bool(row[7], row_num, "school_holiday"),
        )

    rows = _open_rows(source, SERIES_HEADER)
    return _run_rows(rows, len(SERIES_HEADER), build, strict=True, diagnostics=None)
