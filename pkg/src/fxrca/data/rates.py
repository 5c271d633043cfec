"""Annual aggregation of monthly exchange-rate observations."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping

from fxrca.errors import DomainError, SchemaError

__all__ = ["AnnualRates", "annual_mean_exrate", "load_monthly_rates"]


@dataclass(frozen=True)
class AnnualRates:
    """Arithmetic annual means plus the grand mean of the annual means.

    The grand mean is the single number used as the default treatment
    threshold elsewhere in the toolkit.
    """

    annual: dict[int, float]
    grand_mean: float


def annual_mean_exrate(monthly: Mapping[tuple[int, int], float]) -> AnnualRates:
    """Collapse (year, month) -> rate into year -> mean rate.

    Every reported year must carry exactly the twelve calendar months.
    """
    if not monthly:
        raise DomainError("no monthly observations")
    by_year: dict[int, dict[int, float]] = {}
    for (year, month), rate in monthly.items():
        if not 1 <= int(month) <= 12:
            raise DomainError(f"month {month} out of range for year {year}")
        months = by_year.setdefault(int(year), {})
        if int(month) in months:
            raise DomainError(f"duplicate month {month} in year {year}")
        months[int(month)] = float(rate)
    annual: dict[int, float] = {}
    for year in sorted(by_year):
        months = by_year[year]
        if len(months) != 12:
            missing = sorted(set(range(1, 13)) - set(months))
            raise DomainError(
                f"year {year} has {len(months)} months; missing {missing}"
            )
        annual[year] = sum(months.values()) / 12.0
    grand = sum(annual.values()) / len(annual)
    return AnnualRates(annual=annual, grand_mean=grand)


def load_monthly_rates(path) -> dict[tuple[int, int], float]:
    """Read a (year, month, rate) CSV into a keyed mapping."""
    out: dict[tuple[int, int], float] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != ["year", "month", "rate"]:
            raise SchemaError(f"{path}: header must be year,month,rate, got {','.join(header)}")
        for number, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise SchemaError(f"{path}: row {number} has {len(row)} cells, expected 3")
            year_cell, month_cell, rate_cell = (c.strip() for c in row)
            try:
                key = (int(year_cell), int(month_cell))
                value = float(rate_cell)
            except ValueError as exc:
                raise SchemaError(f"{path}: row {number}: {exc}") from None
            if key in out:
                raise SchemaError(f"{path}: row {number}: duplicate (year, month) {key}")
            out[key] = value
    if not out:
        raise SchemaError(f"{path}: no data rows")
    return out
