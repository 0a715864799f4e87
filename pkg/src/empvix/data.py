"""Loading and validating VIX history and option observations."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from itertools import groupby
from pathlib import Path

import numpy as np

from .exceptions import DataError

# quoted VIX has never exceeded 200 points, so decimal levels stay below 2
QUOTED_THRESHOLD = 2.0

_DATE_FORMATS = ("%Y-%m-%d", "%m/%d/%Y")


@dataclass(frozen=True)
class MarketSeries:
    """Dated VIX levels in decimal units (quoted index / 100)."""

    dates: tuple[dt.date, ...]
    levels: np.ndarray

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        dates = tuple(self.dates)
        if levels.ndim != 1 or levels.size != len(dates):
            raise DataError("dates and levels must be 1-D and of equal length")
        if any(b <= a for a, b in zip(dates[:-1], dates[1:])):
            raise DataError("dates must be strictly increasing")
        if not np.all(np.isfinite(levels)) or np.any(levels <= 0):
            raise DataError("levels must be finite and strictly positive")
        if np.any(levels >= QUOTED_THRESHOLD):
            raise DataError("decimal levels must lie below 2; divide quoted points by 100")
        levels.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "levels", levels)

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MarketSeries):
            return NotImplemented
        return self.dates == other.dates and np.array_equal(self.levels, other.levels)

    __hash__ = None


@dataclass(frozen=True)
class OptionObservation:
    """One calibration row: time, VIX level, observed call price, time to expiry."""

    t: float
    vix: float
    call_price: float
    tau: float

    def __post_init__(self):
        vals = (self.t, self.vix, self.call_price, self.tau)
        if not all(math.isfinite(v) for v in vals):
            raise DataError(f"non-finite value in observation {vals}")
        if self.call_price < 0:
            raise DataError(f"observed call price must be >= 0, got {self.call_price}")
        if self.tau <= 0:
            raise DataError(f"time to expiry must be > 0, got {self.tau}")
        if self.vix <= 0:
            raise DataError(f"VIX level must be > 0, got {self.vix}")


def _parse_date(text: str) -> dt.date:
    for fmt in _DATE_FORMATS:
        try:
            return dt.datetime.strptime(text, fmt).date()
        except ValueError:
            pass
    raise ValueError(f"unrecognized date {text!r}")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_vix_csv(path) -> MarketSeries:
    """Read a ``date,close`` CSV into a :class:`MarketSeries`.

    The header is optional. If a header is present and names a ``close``
    column (as in CBOE's published history), that column is used; otherwise
    the second column is. Files whose levels exceed 2 are taken to be quoted
    in index points and are divided by 100. Rows may appear in any order.
    """
    path = Path(path)
    rows: list[tuple[dt.date, float]] = []
    col = 1
    with path.open(newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not f.strip() for f in rec):
                continue
            fields = [f.strip() for f in rec]
            if lineno == 1 and not _is_number(fields[-1]):
                lowered = [f.lower() for f in fields]
                if "close" in lowered:
                    col = lowered.index("close")
                continue
            try:
                rows.append((_parse_date(fields[0]), float(fields[col])))
            except (ValueError, IndexError) as exc:
                raise DataError(f"{path}:{lineno}: malformed row {rec!r} ({exc})") from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    rows.sort(key=lambda r: r[0])
    dates = [d for d, _ in rows]
    for a, b in zip(dates[:-1], dates[1:]):
        if a == b:
            raise DataError(f"{path}: duplicate date {a.isoformat()}")
    levels = np.array([v for _, v in rows])
    if not np.all(np.isfinite(levels)) or np.any(levels <= 0):
        raise DataError(f"{path}: levels must be finite and strictly positive")
    if np.any(levels > QUOTED_THRESHOLD):
        levels = levels / 100.0
    return MarketSeries(tuple(dates), levels)


def save_vix_csv(series: MarketSeries, path) -> None:
    """Write ``series`` as ``date,close`` with decimal levels."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date", "close"])
        for d, v in zip(series.dates, series.levels):
            w.writerow([d.isoformat(), repr(float(v))])


def weekly_average(series: MarketSeries) -> MarketSeries:
    """Average levels within each ISO week.

    Each output entry is dated by the last observation of its week.
    """
    if len(series) == 0:
        raise DataError("weekly_average needs a nonempty series")
    dates, levels = [], []
    pairs = zip(series.dates, series.levels)
    for _, grp in groupby(pairs, key=lambda p: p[0].isocalendar()[:2]):
        grp = list(grp)
        dates.append(grp[-1][0])
        levels.append(float(np.mean([v for _, v in grp])))
    return MarketSeries(tuple(dates), np.array(levels))


def load_observations(path) -> list[OptionObservation]:
    """Read a ``t,vix,call_price,tau`` CSV of option observations."""
    path = Path(path)
    out = []
    with path.open(newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not f.strip() for f in rec):
                continue
            if lineno == 1 and not _is_number(rec[0].strip()):
                continue
            if len(rec) < 4:
                raise DataError(f"{path}:{lineno}: expected 4 columns t,vix,call_price,tau")
            try:
                t, vix, c, tau = (float(f) for f in rec[:4])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: malformed row {rec!r} ({exc})") from None
            try:
                out.append(OptionObservation(t, vix, c, tau))
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    if not out:
        raise DataError(f"{path}: no data rows")
    return out


def save_observations(observations, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "vix", "call_price", "tau"])
        for o in observations:
            w.writerow([repr(o.t), repr(o.vix), repr(o.call_price), repr(o.tau)])


# Weekly averages from 2022-11-07 to 2022-12-09 for a VIX call with K=0.2,
# r=0.0374, expiring 2023-03-22: (week, VIX, call price, time to expiry, x).
WEEKLY_CALL_ROWS = (
    (1, 0.24406, 0.07926, 0.364, 0.5852),
    (2, 0.23886, 0.07966, 0.345, 0.5460),
    (3, 0.21125, 0.06875, 0.326, 0.3198),
    (4, 0.20716, 0.06690, 0.307, 0.2813),
    (5, 0.22144, 0.06474, 0.288, 0.4159),
    (6, 0.22828, 0.06256, 0.268, 0.4686),
    (7, 0.21362, 0.06178, 0.249, 0.3430),
    (8, 0.21725, 0.05838, 0.225, 0.3783),
    (9, 0.22125, 0.04835, 0.208, 0.4142),
    (10, 0.20164, 0.03815, 0.192, 0.2312),
)


def weekly_call_observations() -> list[OptionObservation]:
    """Weekly VIX call observations from November-December 2022.

    ``t`` is measured in years from the first week's observation.
    """
    t0 = WEEKLY_CALL_ROWS[0][3]
    return [OptionObservation(t0 - tau, vix, c, tau) for _, vix, c, tau, _ in WEEKLY_CALL_ROWS]
