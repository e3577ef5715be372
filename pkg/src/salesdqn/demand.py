"""Demand time series: CSV ingestion, max-normalisation, synthetic generator.

CSV schema (header required, comma separated, UTF-8):

    date        ISO date YYYY-MM-DD      } one of the two is required
    day_index   integer                  }
    demand      non-negative decimal
    promo       0 or 1
    weekday     0=Monday .. 6=Sunday     optional, used only without ``date``
"""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

DEFAULT_WEEKDAY_PROFILE = (1.0, 0.95, 0.9, 0.95, 1.05, 1.3, 0.4)


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class DemandSeries:
    demand: np.ndarray
    promo: np.ndarray
    weekday: np.ndarray
    day_index: np.ndarray
    dates: tuple | None = None

    def __post_init__(self):
        n = len(self.demand)
        if not (len(self.promo) == len(self.weekday) == len(self.day_index) == n):
            raise DataError("series columns differ in length")
        if self.dates is not None and len(self.dates) != n:
            raise DataError("dates column differs in length")
        if (self.demand < 0).any():
            raise DataError("negative demand")
        for arr in (self.demand, self.promo, self.weekday, self.day_index):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return len(self.demand)


def _series(demand, promo, weekday, day_index, dates=None) -> DemandSeries:
    return DemandSeries(np.asarray(demand, dtype=np.float64), np.asarray(promo, dtype=np.int64),
                        np.asarray(weekday, dtype=np.int64), np.asarray(day_index, dtype=np.int64),
                        None if dates is None else tuple(dates))


def load_csv(path) -> DemandSeries:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = set(reader.fieldnames or ())
        missing = {"demand", "promo"} - cols
        if missing:
            raise DataError(f"{path}: missing column(s) {sorted(missing)}")
        if "date" not in cols and "day_index" not in cols:
            raise DataError(f"{path}: need a 'date' or 'day_index' column")
        use_date = "date" in cols
        rows = []
        for row in reader:
            line = reader.line_num
            try:
                demand = float(row["demand"])
                promo = int(row["promo"])
                if use_date:
                    key = dt.date.fromisoformat(row["date"].strip())
                    weekday = key.weekday()
                else:
                    key = int(row["day_index"])
                    weekday = int(row["weekday"]) if row.get("weekday") not in (None, "") else key % 7
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}: line {line}: cannot parse row ({exc})") from None
            if not np.isfinite(demand) or demand < 0:
                raise DataError(f"{path}: line {line}: demand must be a non-negative number, got {row['demand']!r}")
            if promo not in (0, 1):
                raise DataError(f"{path}: line {line}: promo must be 0 or 1, got {row['promo']!r}")
            if not 0 <= weekday <= 6:
                raise DataError(f"{path}: line {line}: weekday must be in 0..6, got {weekday}")
            rows.append((key, demand, promo, weekday))

    rows.sort(key=lambda r: r[0])
    if use_date:
        start = rows[0][0] if rows else None
        day_index = [(r[0] - start).days for r in rows]
        dates = [r[0].isoformat() for r in rows]
    else:
        day_index = [r[0] for r in rows]
        dates = None
    return _series([r[1] for r in rows], [r[2] for r in rows], [r[3] for r in rows], day_index, dates)


def save_csv(series: DemandSeries, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if series.dates is not None:
            w.writerow(["date", "demand", "promo"])
            for date, d, p in zip(series.dates, series.demand, series.promo):
                w.writerow([date, repr(float(d)), int(p)])
        else:
            w.writerow(["day_index", "demand", "promo", "weekday"])
            for i, d, p, wd in zip(series.day_index, series.demand, series.promo, series.weekday):
                w.writerow([int(i), repr(float(d)), int(p), int(wd)])


def normalize(series: DemandSeries) -> DemandSeries:
    """Scale demand by its maximum; an all-zero series is returned unchanged."""
    peak = series.demand.max() if len(series) else 0.0
    if peak <= 0:
        return series
    return replace(series, demand=series.demand / peak)


def synth_generate(seed: int, n_days: int, weekday_profile=DEFAULT_WEEKDAY_PROFILE,
                   promo_uplift: float = 1.5, noise_sigma: float = 0.1,
                   promo_start_prob: float = 0.08, promo_len=(3, 6),
                   start_weekday: int = 0) -> DemandSeries:
    """Retail-like daily demand: weekly profile x promo uplift x lognormal noise, max-normalised.

    Promotions come in blocks of ``promo_len`` days (inclusive range), each
    non-promo day starting a new block with probability ``promo_start_prob``.
    """
    if n_days < 0:
        raise ValueError("n_days must be non-negative")
    rng = np.random.default_rng(seed)
    profile = np.asarray(weekday_profile, dtype=np.float64)
    if profile.shape != (7,):
        raise ValueError("weekday_profile needs 7 multipliers")

    promo = np.zeros(n_days, dtype=np.int64)
    i = 0
    while i < n_days:
        if rng.random() < promo_start_prob:
            length = int(rng.integers(promo_len[0], promo_len[1] + 1))
            promo[i:i + length] = 1
            i += length
        else:
            i += 1

    day_index = np.arange(n_days)
    weekday = (day_index + start_weekday) % 7
    noise = rng.lognormal(mean=0.0, sigma=noise_sigma, size=n_days)
    demand = profile[weekday] * np.where(promo == 1, promo_uplift, 1.0) * noise
    return normalize(_series(np.clip(demand, 0.0, None), promo, weekday, day_index))
