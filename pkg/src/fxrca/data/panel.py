"""Province-year panel container, CSV ingestion, and derived columns.

The on-disk schema uses exact lowercase headers. Twelve columns are
required; market, epu, and gpr are optional and only needed to build the
instrument. Derived columns (treat, post, relative_year, d_exrate,
l_exrate, tool, l_tool) are never read from disk as requirements but
survive a round trip when present. Missing values are rejected in
required columns and tolerated (as empty cells) only in derived or
optional extras, since lagged and differenced columns are undefined in
each province's first year.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from fxrca.errors import ConfigError, DomainError, SchemaError
from fxrca.econometrics.base import abs_first_difference
from fxrca.econometrics.did import DidSpec

__all__ = [
    "REQUIRED_COLUMNS",
    "OPTIONAL_COLUMNS",
    "CONTROL_COLUMNS",
    "PanelDataset",
    "load_panel_csv",
    "assign_treat_post",
    "build_instrument",
    "add_exrate_features",
]

REQUIRED_COLUMNS = (
    "province",
    "year",
    "rca",
    "exrate",
    "unemployment",
    "ln_population",
    "ln_retail",
    "ln_power",
    "vgdp",
    "law",
    "ln_government",
    "ln_first",
)

OPTIONAL_COLUMNS = ("market", "epu", "gpr")

# The macro controls: everything required beyond identifiers, outcome, rate.
CONTROL_COLUMNS = REQUIRED_COLUMNS[4:]

_SCHEMA_ORDER = REQUIRED_COLUMNS + OPTIONAL_COLUMNS


def _column_order(columns) -> list[str]:
    known = [c for c in _SCHEMA_ORDER if c in columns]
    extra = sorted(c for c in columns if c not in _SCHEMA_ORDER)
    return known + extra


@dataclass(frozen=True)
class PanelDataset:
    """Validated (province, year) panel. Instances are immutable values;
    every derivation returns a new dataset."""

    frame: pd.DataFrame

    @staticmethod
    def from_frame(frame: pd.DataFrame) -> "PanelDataset":
        missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
        if missing:
            raise SchemaError("missing required column(s): " + ", ".join(missing))
        frame = frame.copy()
        frame["province"] = frame["province"].astype(str)
        try:
            frame["year"] = frame["year"].astype(np.int64)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"year column is not integral: {exc}") from None
        for column in frame.columns:
            if column in ("province", "year"):
                continue
            try:
                frame[column] = frame[column].astype(np.float64)
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"column {column!r} is not numeric: {exc}") from None
            if column in REQUIRED_COLUMNS and frame[column].isna().any():
                rows = frame.index[frame[column].isna()].tolist()[:5]
                raise SchemaError(
                    f"missing value(s) in required column {column!r} at row(s) {rows}"
                )
        keys = frame[["province", "year"]]
        dupes = keys[keys.duplicated()]
        if not dupes.empty:
            first = dupes.iloc[0]
            raise SchemaError(
                f"duplicate (province, year) key: ({first['province']!r}, {int(first['year'])})"
            )
        frame = frame.sort_values(["province", "year"], kind="mergesort").reset_index(drop=True)
        return PanelDataset(frame=frame)

    def with_frame(self, frame: pd.DataFrame) -> "PanelDataset":
        return PanelDataset(frame=frame.reset_index(drop=True))

    def with_columns(self, **columns) -> "PanelDataset":
        return self.with_frame(self.frame.assign(**columns))

    @property
    def n_rows(self) -> int:
        return len(self.frame)

    def years(self) -> tuple[int, ...]:
        return tuple(int(y) for y in np.sort(self.frame["year"].unique()))

    def provinces(self) -> tuple[str, ...]:
        return tuple(sorted(self.frame["province"].unique()))

    def equals(self, other: "PanelDataset") -> bool:
        a, b = self.frame, other.frame
        if sorted(a.columns) != sorted(b.columns):
            return False
        b = b[list(a.columns)]
        if len(a) != len(b):
            return False
        for column in a.columns:
            x, y = a[column].to_numpy(), b[column].to_numpy()
            if column in ("province",):
                if not (x == y).all():
                    return False
            elif column == "year":
                if not (x == y).all():
                    return False
            else:
                same = (x == y) | (np.isnan(x) & np.isnan(y))
                if not same.all():
                    return False
        return True

    def to_csv_text(self) -> str:
        columns = _column_order(self.frame.columns)
        out = io.StringIO()
        out.write(",".join(columns) + "\n")
        for _, row in self.frame.iterrows():
            cells = []
            for column in columns:
                value = row[column]
                if column == "province":
                    cells.append(str(value))
                elif column == "year":
                    cells.append(str(int(value)))
                elif isinstance(value, float) and math.isnan(value):
                    cells.append("")
                else:
                    cells.append(repr(float(value)))
            out.write(",".join(cells) + "\n")
        return out.getvalue()


def load_panel_csv(path) -> PanelDataset:
    """Parse and validate a panel CSV.

    Errors name the offending row (1-based, header excluded) and column.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing required column(s): " + ", ".join(missing))
        records: list[dict] = []
        for number, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise SchemaError(
                    f"{path}: row {number} has {len(row)} cells, expected {len(header)}"
                )
            record = {}
            for column, cell in zip(header, row):
                cell = cell.strip()
                if column == "province":
                    if not cell:
                        raise SchemaError(f"{path}: row {number}: empty province")
                    record[column] = cell
                    continue
                if not cell:
                    if column in REQUIRED_COLUMNS:
                        raise SchemaError(
                            f"{path}: row {number}: missing value in required column {column!r}"
                        )
                    record[column] = math.nan
                    continue
                if column == "year":
                    try:
                        record[column] = int(cell)
                    except ValueError:
                        raise SchemaError(
                            f"{path}: row {number}: non-integer year {cell!r}"
                        ) from None
                    continue
                try:
                    record[column] = float(cell)
                except ValueError:
                    raise SchemaError(
                        f"{path}: row {number}: non-numeric value {cell!r} in column {column!r}"
                    ) from None
            records.append(record)
    if not records:
        raise SchemaError(f"{path}: no data rows")
    return PanelDataset.from_frame(pd.DataFrame.from_records(records, columns=header))


def assign_treat_post(panel: PanelDataset, did_spec: DidSpec) -> PanelDataset:
    """Assign treat/post/relative_year from the threshold rule.

    treat is 1 when exrate strictly exceeds the threshold (a value exactly
    at the threshold is untreated); post is 1 from the shock year on.
    Idempotent: reassigning with the same spec reproduces the columns.
    """
    frame = panel.frame
    years = frame["year"]
    start, end = did_spec.window
    if start < int(years.min()) or end > int(years.max()):
        raise ConfigError(
            f"window {did_spec.window} extends outside the data span "
            f"[{int(years.min())}, {int(years.max())}]"
        )
    treat = (frame["exrate"] > did_spec.treat_threshold).astype(np.float64)
    post = (years >= did_spec.shock_year).astype(np.float64)
    rel = (years - did_spec.shock_year).astype(np.float64)
    return panel.with_columns(treat=treat, post=post, relative_year=rel)


def build_instrument(panel: PanelDataset) -> PanelDataset:
    """Attach tool = market * ln(epu * gpr) and its one-year lag l_tool.

    The lag is within province; each province's first observed year has no
    lag and carries an empty value, which IV fits must drop.
    """
    frame = panel.frame
    missing = [c for c in OPTIONAL_COLUMNS if c not in frame.columns]
    if missing:
        raise SchemaError("instrument needs column(s): " + ", ".join(missing))
    product = frame["epu"].to_numpy() * frame["gpr"].to_numpy()
    if np.any(product <= 0):
        bad = frame.loc[product <= 0, ["province", "year"]].iloc[0]
        raise DomainError(
            f"epu*gpr must be positive; first violation at "
            f"({bad['province']!r}, {int(bad['year'])})"
        )
    tool = frame["market"].to_numpy() * np.log(product)
    frame = frame.assign(tool=tool)
    lagged = (
        frame.sort_values(["province", "year"], kind="mergesort")
        .groupby("province")["tool"]
        .shift(1)
    )
    frame = frame.assign(l_tool=lagged)
    return panel.with_frame(frame)


def add_exrate_features(panel: PanelDataset) -> PanelDataset:
    """Attach d_exrate (absolute year-over-year change) and l_exrate (lag).

    Both are computed within province over contiguous years; each
    province's first year carries empty values. Non-contiguous years
    surface as an error from the differencing step.
    """
    frame = panel.frame.sort_values(["province", "year"], kind="mergesort")
    d_col = np.full(len(frame), np.nan)
    l_col = np.full(len(frame), np.nan)
    position = {key: i for i, key in enumerate(zip(frame["province"], frame["year"]))}
    for province, group in frame.groupby("province"):
        series = {int(y): float(v) for y, v in zip(group["year"], group["exrate"])}
        diffs = abs_first_difference(series)
        for year in series:
            if year - 1 in diffs:
                i = position[(province, year)]
                d_col[i] = diffs[year - 1]
                l_col[i] = series[year - 1]
    frame = frame.assign(d_exrate=d_col, l_exrate=l_col)
    return panel.with_frame(frame)
