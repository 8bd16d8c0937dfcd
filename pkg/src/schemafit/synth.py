"""Deterministic multi-year dataset generator with scripted schema changes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpecError
from .evalbench import GroundTruth, GroundTruthEntry
from .ingest import RawColumn, Table

FAMILIES = ("uniform", "normal", "lognormal", "poisson")

_PARAM_COUNTS = {"uniform": 2, "normal": 2, "lognormal": 2, "poisson": 1}


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown distribution family {self.family!r}")
        if len(self.params) != _PARAM_COUNTS[self.family]:
            raise SpecError(
                f"family {self.family!r} takes {_PARAM_COUNTS[self.family]} "
                f"parameters, got {len(self.params)}"
            )


@dataclass(frozen=True)
class Mutation:
    """One scripted change taking effect at `year` (1-based, >= 2)."""

    year: int
    op: str
    column: str
    new_name: str | None = None
    family: str | None = None
    params: tuple[float, ...] | None = None
    shift: float = 0.0

    def __post_init__(self):
        if self.op not in ("rename", "add", "remove", "drift"):
            raise SpecError(f"unknown mutation op {self.op!r}")
        if self.op == "rename" and not self.new_name:
            raise SpecError("rename requires new_name")
        if self.op == "add" and (self.family is None or self.params is None):
            raise SpecError("add requires family and params")


@dataclass(frozen=True)
class SyntheticSpec:
    years: int
    rows_per_year: int
    seed: int
    columns: tuple[ColumnSpec, ...]
    mutations: tuple[Mutation, ...] = ()
    first_year: int = 2001

    def __post_init__(self):
        if self.years < 1:
            raise SpecError("years must be >= 1")
        if self.rows_per_year < 1:
            raise SpecError("rows_per_year must be >= 1")
        if not self.columns:
            raise SpecError("at least one column required")
        for m in self.mutations:
            if not 2 <= m.year <= self.years:
                raise SpecError(f"mutation year {m.year} outside 2..{self.years}")

    @classmethod
    def from_dict(cls, raw: dict) -> "SyntheticSpec":
        try:
            columns = tuple(
                ColumnSpec(c["name"], c["family"], tuple(float(p) for p in c["params"]))
                for c in raw["columns"]
            )
            mutations = tuple(
                Mutation(
                    year=int(m["year"]),
                    op=m["op"],
                    column=m.get("column", m.get("name", "")),
                    new_name=m.get("new_name"),
                    family=m.get("family"),
                    params=tuple(float(p) for p in m["params"]) if "params" in m else None,
                    shift=float(m.get("shift", 0.0)),
                )
                for m in raw.get("mutations", ())
            )
            return cls(
                years=int(raw["years"]),
                rows_per_year=int(raw["rows_per_year"]),
                seed=int(raw["seed"]),
                columns=columns,
                mutations=mutations,
                first_year=int(raw.get("first_year", 2001)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed synthetic spec: {exc}") from exc


@dataclass
class _Live:
    name: str
    family: str
    params: tuple[float, ...]
    offset: float = 0.0


def _draw(rng: np.random.Generator, col: _Live, rows: int) -> np.ndarray:
    if col.family == "uniform":
        values = rng.uniform(col.params[0], col.params[1], size=rows)
    elif col.family == "normal":
        values = rng.normal(col.params[0], col.params[1], size=rows)
    elif col.family == "lognormal":
        values = rng.lognormal(col.params[0], col.params[1], size=rows)
    else:
        values = rng.poisson(col.params[0], size=rows).astype(float)
    return values + col.offset


def _table(release: str, state: list[_Live], rng, rows: int) -> Table:
    columns = tuple(
        RawColumn(c.name, tuple(repr(float(v)) for v in _draw(rng, c, rows)))
        for c in state
    )
    return Table(name=release, columns=columns, row_count=rows)


def _apply_year(state: list[_Live], muts: list[Mutation], year: int):
    """Mutate `state` in place and return the adjacent-pair entries."""
    touched: set[str] = set()
    live = {c.name: c for c in state}
    renamed: dict[str, str] = {}
    removed: set[str] = set()
    added: list[_Live] = []
    for m in muts:
        if m.column in touched:
            raise SpecError(f"year {year}: column {m.column!r} mutated twice")
        touched.add(m.column)
        if m.op == "add":
            if m.column in live or any(a.name == m.column for a in added):
                raise SpecError(f"year {year}: add of existing column {m.column!r}")
            added.append(_Live(m.column, m.family, m.params))
            continue
        if m.column not in live:
            raise SpecError(f"year {year}: {m.op} of unknown column {m.column!r}")
        if m.op == "rename":
            if m.new_name in live or any(a.name == m.new_name for a in added):
                raise SpecError(f"year {year}: rename collides with {m.new_name!r}")
            renamed[m.column] = m.new_name
        elif m.op == "remove":
            removed.add(m.column)
        else:
            live[m.column].offset += m.shift

    entries = []
    for col in state:
        if col.name in removed:
            entries.append(GroundTruthEntry(col.name, None, "removed"))
        elif col.name in renamed:
            entries.append(GroundTruthEntry(col.name, renamed[col.name], "renamed"))
        else:
            entries.append(GroundTruthEntry(col.name, col.name, "same"))
    for col in added:
        entries.append(GroundTruthEntry(None, col.name, "added"))

    state[:] = [
        _Live(renamed.get(c.name, c.name), c.family, c.params, c.offset)
        for c in state
        if c.name not in removed
    ] + added
    return entries


def generate_synthetic(spec: SyntheticSpec) -> tuple[list[Table], list[GroundTruth]]:
    """Emit one table per year plus ground truths for each adjacent pair."""
    rng = np.random.default_rng(spec.seed)
    state = [_Live(c.name, c.family, c.params) for c in spec.columns]
    releases: list[Table] = []
    gts: list[GroundTruth] = []
    for i in range(spec.years):
        year = spec.first_year + i
        if i > 0:
            muts = [m for m in spec.mutations if m.year == i + 1]
            entries = _apply_year(state, muts, i + 1)
            gts.append(GroundTruth(str(year - 1), str(year), tuple(entries)))
        releases.append(_table(str(year), state, rng, spec.rows_per_year))
    return releases, gts
