"""Ground-truth scoring: Top-k accuracy over yearly and accumulated matching."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DomainError, GroundTruthError
from .ingest import NumericColumn, Table, split_columns
from .matcher import CandidateScore, MatchConfig, PooledColumn, rank_candidates

CHANGE_KINDS = ("same", "renamed", "added", "removed")

GT_HEADER = ("base_column", "new_column", "change")


@dataclass(frozen=True)
class GroundTruthEntry:
    base: str | None
    new: str | None
    change: str


@dataclass(frozen=True)
class GroundTruth:
    release_from: str
    release_to: str
    entries: tuple[GroundTruthEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        _validate_entries(self.entries)

    def counts(self) -> tuple[int, int, int]:
        """(changed, added, removed), where changed counts renames."""
        changed = sum(1 for e in self.entries if e.change == "renamed")
        added = sum(1 for e in self.entries if e.change == "added")
        removed = sum(1 for e in self.entries if e.change == "removed")
        return changed, added, removed


def _validate_entry(entry: GroundTruthEntry, where: str):
    base, new, change = entry.base, entry.new, entry.change
    if change not in CHANGE_KINDS:
        raise GroundTruthError(f"{where}: unknown change kind {change!r}")
    if change == "added" and (base is not None or not new):
        raise GroundTruthError(f"{where}: added entries take only a new column")
    if change == "removed" and (new is not None or not base):
        raise GroundTruthError(f"{where}: removed entries take only a base column")
    if change in ("same", "renamed"):
        if not base or not new:
            raise GroundTruthError(f"{where}: {change} entries need both names")
        if change == "same" and base != new:
            raise GroundTruthError(f"{where}: same entry with differing names")
        if change == "renamed" and base == new:
            raise GroundTruthError(f"{where}: renamed entry with equal names")


def _validate_entries(entries: Sequence[GroundTruthEntry]):
    seen_base: set[str] = set()
    seen_new: set[str] = set()
    for i, entry in enumerate(entries):
        where = f"entry {i + 1}"
        _validate_entry(entry, where)
        if entry.base is not None:
            if entry.base in seen_base:
                raise GroundTruthError(f"{where}: base column {entry.base!r} repeated")
            seen_base.add(entry.base)
        if entry.new is not None:
            if entry.new in seen_new:
                raise GroundTruthError(f"{where}: new column {entry.new!r} repeated")
            seen_new.add(entry.new)


def _releases_from_stem(path: Path) -> tuple[str, str]:
    stem = path.stem
    if "__" in stem:
        left, _, right = stem.partition("__")
        return left, right
    return "", ""


def load_ground_truth(
    path,
    release_from: str | None = None,
    release_to: str | None = None,
) -> GroundTruth:
    """Parse a `base_column,new_column,change` CSV.

    Blank lines and lines starting with "#" are skipped, so exported
    mappings with trailer comments load back unchanged.
    """
    path = Path(path)
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header_seen = False
    for lineno, row in enumerate(rows, start=1):
        if not row or (row[0].startswith("#") and len(row) == 1):
            continue
        stripped = [cell.strip() for cell in row]
        if not header_seen:
            if tuple(stripped) != GT_HEADER:
                raise GroundTruthError(
                    f"{path.name} line {lineno}: expected header "
                    f"{','.join(GT_HEADER)!r}"
                )
            header_seen = True
            continue
        if len(stripped) != 3:
            raise GroundTruthError(
                f"{path.name} line {lineno}: expected 3 fields, got {len(stripped)}"
            )
        base = stripped[0] or None
        new = stripped[1] or None
        entry = GroundTruthEntry(base, new, stripped[2])
        try:
            _validate_entry(entry, "row")
        except GroundTruthError as exc:
            raise GroundTruthError(f"{path.name} line {lineno}: {exc}") from None
        entries.append(entry)
    if not header_seen:
        raise GroundTruthError(f"{path.name}: empty ground truth file")
    try:
        _validate_entries(entries)
    except GroundTruthError as exc:
        raise GroundTruthError(f"{path.name}: {exc}") from None
    if release_from is None or release_to is None:
        release_from, release_to = _releases_from_stem(path)
    return GroundTruth(release_from, release_to, tuple(entries))


def write_ground_truth(gt: GroundTruth, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GT_HEADER)
        for e in gt.entries:
            writer.writerow([e.base or "", e.new or "", e.change])


def topk_accuracy(
    candidates: Mapping[str, Sequence[CandidateScore]],
    gt: GroundTruth,
    k: int,
    p_thresh: float = 0.9,
) -> float:
    """Fraction of scored base columns whose truth lands in the top k.

    A removed column scores a hit when none of its first k candidates
    reaches p_thresh.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if not gt.entries:
        raise DomainError("empty ground truth")
    hits = 0
    scored = 0
    for entry in gt.entries:
        if entry.base is None or entry.base not in candidates:
            continue
        scored += 1
        top = candidates[entry.base][:k]
        if entry.change == "removed":
            if not any(
                c.comparable and c.p_value >= p_thresh for c in top
            ):
                hits += 1
        elif any(c.new_column == entry.new for c in top):
            hits += 1
    if scored == 0:
        raise DomainError("ground truth names no scored base column")
    return hits / scored


@dataclass(frozen=True)
class EvalRow:
    release: str
    changes: tuple[int, int, int] | None
    top1: dict[str, float] = field(default_factory=dict)
    topk: dict[str, float] = field(default_factory=dict)


def _numeric_columns(table: Table) -> list[NumericColumn]:
    numeric, _ = split_columns(table)
    return numeric


def _find_gt(gts: Sequence[GroundTruth], frm: str, to: str) -> GroundTruth:
    for gt in gts:
        if gt.release_from == frm and gt.release_to == to:
            return gt
    raise DomainError(f"no ground truth for pair {frm!r} -> {to!r}")


def _score_pair_tables(base_cols, new_cols, gt, config, tests):
    top1 = {}
    topk = {}
    for test in tests:
        cfg = MatchConfig(
            test=test,
            p_thresh=config.p_thresh,
            bins=config.bins,
            outlier_factor=config.outlier_factor,
            top_k=config.top_k,
            base_order=config.base_order,
        )
        candidates = {
            col.name: rank_candidates(col, new_cols, cfg) for col in base_cols
        }
        top1[test] = topk_accuracy(candidates, gt, 1, config.p_thresh)
        topk[test] = topk_accuracy(candidates, gt, config.top_k, config.p_thresh)
    return top1, topk


def run_year_by_year(
    releases: Sequence[Table],
    gts: Sequence[GroundTruth],
    config: MatchConfig = MatchConfig(),
    tests: Sequence[str] | None = None,
) -> list[EvalRow]:
    """Score each release against its predecessor; first row carries dashes."""
    if not releases:
        raise DomainError("no releases")
    tests = tuple(tests) if tests else (config.test,)
    rows = [EvalRow(releases[0].name, None)]
    for prev, curr in zip(releases, releases[1:]):
        gt = _find_gt(gts, prev.name, curr.name)
        top1, topk = _score_pair_tables(
            _numeric_columns(prev), _numeric_columns(curr), gt, config, tests
        )
        rows.append(EvalRow(curr.name, gt.counts(), top1, topk))
    return rows


def run_accumulated(
    releases: Sequence[Table],
    gts: Sequence[GroundTruth],
    config: MatchConfig = MatchConfig(),
    tests: Sequence[str] | None = None,
) -> list[EvalRow]:
    """Like run_year_by_year, but each base pools its full prior history.

    Column identity is threaded through the ground-truth chain, so a
    renamed column keeps one pooled history.
    """
    if len(releases) < 2:
        raise DomainError("accumulated mode needs at least 2 releases")
    tests = tuple(tests) if tests else (config.test,)
    history: dict[str, list[tuple[float, ...]]] = {
        col.name: [col.values] for col in _numeric_columns(releases[0])
    }
    rows = [EvalRow(releases[0].name, None)]
    for prev, curr in zip(releases, releases[1:]):
        gt = _find_gt(gts, prev.name, curr.name)
        pooled = [
            PooledColumn(
                name=name,
                release=f"{releases[0].name}-{prev.name}",
                parts=tuple(parts),
            )
            for name, parts in history.items()
        ]
        new_cols = _numeric_columns(curr)
        top1, topk = _score_pair_tables(pooled, new_cols, gt, config, tests)
        rows.append(EvalRow(curr.name, gt.counts(), top1, topk))

        by_name = {col.name: col for col in new_cols}
        next_history: dict[str, list[tuple[float, ...]]] = {}
        for entry in gt.entries:
            if entry.new is None or entry.new not in by_name:
                continue
            prior = history.get(entry.base, []) if entry.base else []
            next_history[entry.new] = prior + [by_name[entry.new].values]
        history = next_history
    return rows


def changes_label(counts: tuple[int, int, int] | None) -> str:
    if counts is None:
        return "-"
    if counts == (0, 0, 0):
        return "no change"
    return f"[{counts[0]}]c [{counts[1]}]+ [{counts[2]}]-"


def render_text_table(rows: Sequence[EvalRow], tests: Sequence[str], k: int) -> str:
    """Fixed-width table: one row per release, top1/topk per test."""
    headers = ["year", "changes"] + [f"{t} (top1/top{k})" for t in tests]
    body = []
    for row in rows:
        cells = [row.release, changes_label(row.changes)]
        for t in tests:
            if t in row.top1:
                cells.append(f"{row.top1[t]:.3f}/{row.topk[t]:.3f}")
            else:
                cells.append("-")
        body.append(cells)
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in body)) if body else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for cells in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
    return "\n".join(lines) + "\n"
