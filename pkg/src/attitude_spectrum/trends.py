"""Weekly post volume and LOWESS smoothing of per-post series."""
from __future__ import annotations

import csv
import hashlib
import math
from collections import Counter
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import RawPost

SECONDS_PER_DAY = 86400.0


class InsufficientData(ValueError):
    pass


def week_start(ts: datetime) -> date:
    d = ts.astimezone(timezone.utc).date()
    return d - timedelta(days=d.isoweekday() - 1)


def weekly_volume(posts: Iterable[RawPost]) -> list[tuple[date, int]]:
    """Post counts per ISO week (Monday start), zero-filled between first and last week."""
    counts = Counter(week_start(p.timestamp) for p in posts)
    if not counts:
        return []
    first, last = min(counts), max(counts)
    out = []
    week = first
    while week <= last:
        out.append((week, counts.get(week, 0)))
        week += timedelta(days=7)
    return out


def days_since(timestamps: Sequence[datetime], origin: datetime | None = None) -> np.ndarray:
    origin = origin or min(timestamps)
    return np.array([(ts - origin).total_seconds() / SECONDS_PER_DAY for ts in timestamps])


def jitter_ties(t, ids: Sequence[str], scale: float = 0.5 / SECONDS_PER_DAY) -> np.ndarray:
    """Separate tied times by a sub-second offset derived from a stable hash of each id."""
    t = np.asarray(t, dtype=float).copy()
    _, inverse, counts = np.unique(t, return_inverse=True, return_counts=True)
    for i in np.flatnonzero(counts[inverse] > 1):
        h = int.from_bytes(hashlib.sha256(ids[i].encode("utf-8")).digest()[:8], "big")
        t[i] += scale * (h / 2.0**64)
    return t


def _local_linear(x: np.ndarray, y: np.ndarray, w: np.ndarray, x0: float) -> float:
    total = w.sum()
    xm = (w * x).sum() / total
    ym = (w * y).sum() / total
    dx = x - xm
    sxx = (w * dx * dx).sum()
    # no spread in x inside the window: fall back to the weighted mean
    if sxx <= 1e-12 * total * max(float(np.ptp(x)), 1.0) ** 2:
        return float(ym)
    slope = (w * dx * (y - ym)).sum() / sxx
    return float(ym + slope * (x0 - xm))


def _tricube_row(x: np.ndarray, i: int, q: int) -> np.ndarray:
    d = np.abs(x - x[i])
    h = np.partition(d, q - 1)[q - 1]
    if h <= 0:
        return (d == 0).astype(float)
    u = np.minimum(d / h, 1.0)
    return (1.0 - u**3) ** 3


def lowess(t, y, bandwidth_fraction: float = 0.3, robust_iterations: int = 2) -> np.ndarray:
    """Locally weighted linear regression (Cleveland 1979).

    Each point is fit with tricube weights over its ceil(f*n) nearest
    neighbours, the bandwidth being the distance to the farthest of those.
    ``robust_iterations`` bisquare reweighting passes follow the first fit.
    Returns smoothed values aligned with the input order.
    """
    x = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 2 or len(y) != n:
        raise InsufficientData("lowess needs at least two (t, y) pairs of equal length")
    if not 0 < bandwidth_fraction <= 1:
        raise ValueError("bandwidth_fraction must be in (0, 1]")
    if robust_iterations < 0:
        raise ValueError("robust_iterations must be >= 0")
    # the epsilon keeps e.g. 0.3 * 100 from rounding up to 31
    q = min(n, max(2, math.ceil(bandwidth_fraction * n - 1e-9)))

    robust = np.ones(n)
    fitted = np.empty(n)
    for it in range(robust_iterations + 1):
        for i in range(n):
            base = _tricube_row(x, i, q)
            w = base * robust
            if w.sum() <= 0:
                w = base
            fitted[i] = _local_linear(x, y, w, x[i])
        if it == robust_iterations:
            break
        resid = y - fitted
        s = float(np.median(np.abs(resid)))
        if s <= 0:
            break
        r = np.clip(resid / (6.0 * s), -1.0, 1.0)
        robust = (1.0 - r * r) ** 2
    return fitted


TREND_COLUMNS = ("t_iso", "raw_y", "smoothed_y", "series")


def trend_rows(timestamps: Sequence[datetime], raw: Sequence[float], smoothed: Sequence[float], series: str) -> list[tuple]:
    order = sorted(range(len(timestamps)), key=lambda i: timestamps[i])
    return [
        (timestamps[i].astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"), repr(float(raw[i])), repr(float(smoothed[i])), series)
        for i in order
    ]


def write_trends(rows: Iterable[tuple], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TREND_COLUMNS)
        writer.writerows(rows)
