"""Export tables and the revealed-comparative-advantage index.

The index compares a region's export share in one industry with the world
share of that industry:

    rca = (x[r,i,t] / sum_i x[r,i,t]) / (sum_r x[r,i,t] / sum_r sum_i x[r,i,t])

where the world aggregate plays the role of sum_r. A value above 1 marks
an industry the region is specialized in; published band edges at 0.8,
1.25, and 2.5 grade the strength. Band edges are closed on the left, so
exactly 0.8 is moderate and exactly 2.5 is extremely strong.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from fxrca.errors import DomainError, SchemaError

__all__ = [
    "WORLD_REGION",
    "RCA_BANDS",
    "ExportTable",
    "load_export_table",
    "rca_index_from_exports",
    "classify_rca",
]

WORLD_REGION = "WORLD"

RCA_BANDS = (
    (0.8, "weak"),
    (1.25, "moderate"),
    (2.5, "strong"),
    (None, "extremely_strong"),
)


@dataclass(frozen=True)
class ExportTable:
    """Export values keyed by (region, industry, year), plus a designated
    world region whose rows aggregate all regions."""

    entries: dict[tuple[str, str, int], float]
    world_region: str = WORLD_REGION
    _region_totals: dict = field(default_factory=dict, repr=False, compare=False)

    @staticmethod
    def from_entries(entries, world_region: str = WORLD_REGION) -> "ExportTable":
        table: dict[tuple[str, str, int], float] = {}
        for (region, industry, year), value in dict(entries).items():
            value = float(value)
            if value < 0:
                raise DomainError(
                    f"negative export value {value} at ({region!r}, {industry!r}, {year})"
                )
            table[(str(region), str(industry), int(year))] = value
        built = ExportTable(entries=table, world_region=world_region)
        built._ensure_world()
        built._validate()
        return built

    def _ensure_world(self) -> None:
        has_world = any(r == self.world_region for r, _, _ in self.entries)
        if has_world:
            return
        sums: dict[tuple[str, int], float] = {}
        for (region, industry, year), value in self.entries.items():
            key = (industry, year)
            sums[key] = sums.get(key, 0.0) + value
        for (industry, year), value in sums.items():
            self.entries[(self.world_region, industry, year)] = value

    def _validate(self) -> None:
        for (region, industry, year), value in self.entries.items():
            if region == self.world_region:
                continue
            world = self.entries.get((self.world_region, industry, year), 0.0)
            if value > world * (1 + 1e-12) + 1e-12:
                raise DomainError(
                    f"region {region!r} exports {value} exceed the world total {world} "
                    f"for ({industry!r}, {year})"
                )

    def regions(self) -> tuple[str, ...]:
        return tuple(sorted({r for r, _, _ in self.entries if r != self.world_region}))

    def industries(self) -> tuple[str, ...]:
        return tuple(sorted({i for _, i, _ in self.entries}))

    def years(self) -> tuple[int, ...]:
        return tuple(sorted({y for _, _, y in self.entries}))

    def value(self, region: str, industry: str, year: int) -> float:
        return self.entries.get((region, industry, year), 0.0)

    def region_total(self, region: str, year: int) -> float:
        return sum(
            v for (r, _, y), v in self.entries.items() if r == region and y == year
        )


def load_export_table(path, world_region: str = WORLD_REGION) -> ExportTable:
    """Read a (region, industry, year, export_value) CSV into a table."""
    entries: dict[tuple[str, str, int], float] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        expected = ["region", "industry", "year", "export_value"]
        if header != expected:
            raise SchemaError(
                f"{path}: header must be {','.join(expected)}, got {','.join(header)}"
            )
        for number, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                raise SchemaError(f"{path}: row {number} has {len(row)} cells, expected 4")
            region, industry, year_cell, value_cell = (c.strip() for c in row)
            try:
                year = int(year_cell)
            except ValueError:
                raise SchemaError(f"{path}: row {number}: non-integer year {year_cell!r}") from None
            try:
                value = float(value_cell)
            except ValueError:
                raise SchemaError(
                    f"{path}: row {number}: non-numeric export_value {value_cell!r}"
                ) from None
            key = (region, industry, year)
            if key in entries:
                raise SchemaError(f"{path}: row {number}: duplicate entry for {key}")
            entries[key] = value
    if not entries:
        raise SchemaError(f"{path}: no data rows")
    return ExportTable.from_entries(entries, world_region=world_region)


def rca_index_from_exports(table: ExportTable, region: str, industry: str, year: int) -> float:
    """Share-of-shares index for one (region, industry, year) cell.

    A missing numerator cell counts as zero exports and yields 0.0; a zero
    in any of the three denominators is a domain error naming the sum.
    """
    world = table.world_region
    if region == world:
        raise DomainError("the world aggregate has no index against itself")
    region_total = table.region_total(region, year)
    if region_total <= 0:
        raise DomainError(
            f"region total for ({region!r}, {year}) is zero; the region share is undefined"
        )
    world_industry = table.value(world, industry, year)
    if world_industry <= 0:
        raise DomainError(
            f"world exports for ({industry!r}, {year}) are zero; the world share is undefined"
        )
    world_total = table.region_total(world, year)
    if world_total <= 0:
        raise DomainError(f"world total for {year} is zero; the world share is undefined")
    numerator = table.value(region, industry, year)
    if numerator == 0.0:
        return 0.0
    return (numerator / region_total) / (world_industry / world_total)


def classify_rca(value: float) -> str:
    """Band label for a positive index value."""
    if not value > 0:
        raise DomainError(f"index must be positive to classify, got {value}")
    for edge, label in RCA_BANDS:
        if edge is None or value < edge:
            return label
    raise AssertionError("unreachable")
