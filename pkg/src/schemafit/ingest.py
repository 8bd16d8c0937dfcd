"""CSV ingestion: releases as tables, columns as clean numeric vectors.

A release is one CSV file with a mandatory header row.  Cells equal to a
null token (after trimming, case-insensitive) become explicit nulls so that
row counts stay exact.  Numeric columns are extracted with per-column
bookkeeping of how many cells were dropped and why.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal

from .errors import KindError, ParseError

DEFAULT_NULL_TOKENS = frozenset({"", "na", "null"})

#: Minimum fraction of non-null cells that must parse as finite numbers for a
#: column to count as numeric.  Tolerates stray sentinel strings.
NUMERIC_KIND_THRESHOLD = 0.99

ColumnKind = Literal["numeric", "non_numeric"]


@dataclass(frozen=True)
class RawColumn:
    """One named column of text cells; missing cells are ``None``."""

    name: str
    cells: tuple[str | None, ...]


@dataclass(frozen=True)
class Table:
    """One release: ordered columns of equal length plus a release label."""

    name: str
    columns: tuple[RawColumn, ...]
    row_count: int

    def column(self, name: str) -> RawColumn:
        for col in self.columns:
            if col.name == name:
                return col
        raise KeyError(name)


@dataclass(frozen=True)
class NumericColumn:
    """A year-tagged vector of finite values with null/drop bookkeeping."""

    name: str
    release: str
    values: tuple[float, ...]
    dropped_nulls: int = 0
    dropped_non_numeric: int = 0


def _parse_number(cell: str) -> float | None:
    try:
        value = float(cell.strip())
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _normalize_tokens(null_tokens: Iterable[str]) -> frozenset[str]:
    return frozenset(tok.strip().casefold() for tok in null_tokens)


def load_table(
    path: str | Path,
    delimiter: str = ",",
    null_tokens: Iterable[str] = DEFAULT_NULL_TOKENS,
    name: str | None = None,
) -> Table:
    """Parse one CSV release into a :class:`Table`.

    The first row is the header.  Column names are kept verbatim but must be
    unique after trimming and case-folding.  Every data row must have exactly
    as many cells as the header; a ragged row raises :class:`ParseError`
    naming the 1-based data row index.
    """
    path = Path(path)
    if len(delimiter) != 1:
        raise ParseError(f"delimiter must be a single character, got {delimiter!r}")
    tokens = _normalize_tokens(null_tokens)

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, header row is mandatory") from None
        header = [h.strip() for h in header]
        if any(not h for h in header):
            raise ParseError(f"{path}: blank column name in header")
        folded = [h.casefold() for h in header]
        if len(set(folded)) != len(folded):
            dupes = sorted({h for h in folded if folded.count(h) > 1})
            raise ParseError(f"{path}: duplicate header names {dupes}")

        cells: list[list[str | None]] = [[] for _ in header]
        row_count = 0
        for i, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: expected {len(header)} cells, found {len(row)}", row=i
                )
            for j, cell in enumerate(row):
                cells[j].append(None if cell.strip().casefold() in tokens else cell)
            row_count += 1

    columns = tuple(
        RawColumn(name=h, cells=tuple(col)) for h, col in zip(header, cells)
    )
    return Table(name=name or path.stem, columns=columns, row_count=row_count)


def write_table(table: Table, path: str | Path, delimiter: str = ",") -> None:
    """Write a table back to CSV; nulls become empty cells."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow([col.name for col in table.columns])
        for i in range(table.row_count):
            row = ["" if col.cells[i] is None else col.cells[i] for col in table.columns]
            if row == [""]:
                # A bare empty line would be skipped on re-read; force quoting.
                fh.write('""\r\n')
            else:
                writer.writerow(row)


def infer_kind(column: RawColumn, threshold: float = NUMERIC_KIND_THRESHOLD) -> ColumnKind:
    """Classify a column as numeric when enough of its non-null cells parse.

    Columns with no non-null cells are non-numeric: there is nothing to test.
    """
    non_null = [c for c in column.cells if c is not None]
    if not non_null:
        return "non_numeric"
    parsed = sum(1 for c in non_null if _parse_number(c) is not None)
    return "numeric" if parsed / len(non_null) >= threshold else "non_numeric"


def to_numeric_column(
    column: RawColumn, release: str, require_numeric: bool = True
) -> NumericColumn:
    """Extract the finite values of a numeric column, counting what was dropped."""
    if require_numeric and infer_kind(column) != "numeric":
        raise KindError(f"column {column.name!r} is not numeric")
    values: list[float] = []
    nulls = 0
    bad = 0
    for cell in column.cells:
        if cell is None:
            nulls += 1
            continue
        value = _parse_number(cell)
        if value is None:
            bad += 1
        else:
            values.append(value)
    return NumericColumn(
        name=column.name,
        release=release,
        values=tuple(values),
        dropped_nulls=nulls,
        dropped_non_numeric=bad,
    )


def split_columns(
    table: Table, threshold: float = NUMERIC_KIND_THRESHOLD
) -> tuple[list[NumericColumn], list[str]]:
    """Partition a table into numeric columns and the names of the rest."""
    numeric: list[NumericColumn] = []
    other: list[str] = []
    for col in table.columns:
        if infer_kind(col, threshold) == "numeric":
            numeric.append(to_numeric_column(col, table.name, require_numeric=False))
        else:
            other.append(col.name)
    return numeric, other
