"""Bundled synthetic price data and CSV helpers."""
from __future__ import annotations

import csv
from datetime import date, timedelta
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.special import ndtr
from scipy.stats import t as student_t

from .copula import daily_returns

SYNTHETIC_RHO = 0.5
SYNTHETIC_DAYS = 2264
SYNTHETIC_SEED = 2010
SYNTHETIC_SYMBOLS = ("SYNA", "SYNB")


def business_days(start: date, count: int) -> list[date]:
    days, d = [], start
    while len(days) < count:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return days


def make_synthetic_prices(
    n_days: int = SYNTHETIC_DAYS, rho: float = SYNTHETIC_RHO, seed: int = SYNTHETIC_SEED
) -> tuple[list[date], np.ndarray]:
    """Two price paths whose daily returns follow a Gaussian copula with
    Student-t(4) marginals (about 1.5% daily scale)."""
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(np.array([[1.0, rho], [rho, 1.0]]))
    u = ndtr(rng.standard_normal((n_days - 1, 2)) @ chol.T)
    returns = 0.0005 + 0.011 * student_t.ppf(u, df=4)
    prices = 100.0 * np.vstack([np.ones(2), np.cumprod(1.0 + returns, axis=0)])
    return business_days(date(2010, 1, 4), n_days), prices


def write_prices_csv(path, dates, prices, symbols=SYNTHETIC_SYMBOLS) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", *symbols])
        for d, row in zip(dates, prices):
            writer.writerow([d.isoformat(), *(f"{p:.6f}" for p in row)])


def synthetic_prices_path() -> Path:
    return Path(str(resources.files("qcopula") / "data" / "synthetic_prices.csv"))


def read_prices_csv(path) -> tuple[list[str], np.ndarray, list[str]]:
    """Parse ``date,<a>,<b>``; missing or unparsable cells become NaN."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) != 3 or rows[0][0].strip().lower() != "date":
        raise ValueError("prices CSV must have header 'date,<sym1>,<sym2>'")
    symbols = [s.strip() for s in rows[0][1:]]
    dates, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
        date.fromisoformat(row[0].strip())
        dates.append(row[0].strip())
        parsed = []
        for cell in row[1:]:
            cell = cell.strip()
            try:
                parsed.append(float(cell) if cell else np.nan)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad price {cell!r}") from exc
        values.append(parsed)
    return dates, np.array(values, dtype=float).reshape(-1, 2), symbols


def paired_returns(prices: np.ndarray) -> np.ndarray:
    """Daily returns of both series after dropping any date with a missing price."""
    prices = np.asarray(prices, dtype=float)
    complete = prices[~np.isnan(prices).any(axis=1)]
    if len(complete) < 2:
        raise ValueError(f"need at least 2 complete price rows, got {len(complete)}")
    return np.column_stack([daily_returns(complete[:, 0]), daily_returns(complete[:, 1])])


def write_points_csv(path, points, header=("r1", "r2")) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in np.asarray(points):
            writer.writerow([f"{v:.9g}" for v in row])


def read_points_csv(path) -> tuple[tuple[str, ...], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} is empty")
    header = tuple(c.strip() for c in rows[0])
    data = np.array([[float(c) for c in row] for row in rows[1:] if row], dtype=float)
    return header, data.reshape(-1, len(header))
