"""Greedy column matching across two releases.

Each base column is scored against every new column through one shared
pipeline (outlier removal, common grid, histograms, chosen test) and then
greedily claims the best-ranked candidate that clears the p-value gate.
Candidates already claimed by an earlier base column are skipped, never
reassigned, so the result is a partial injective mapping.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DegenerateVarianceError, DomainError
from .gof import TestResult, ad_test, f_test, from_histogram, ks_test, welch_test
from .ingest import NumericColumn
from .preprocess import (
    build_histogram,
    normalize_histogram,
    pool_years,
    remove_outliers_iqr,
    shared_edges,
)

TEST_FUNCTIONS = {
    "ks": ks_test,
    "ad": ad_test,
    "welch": welch_test,
    "f": f_test,
}

BASE_ORDERS = ("schema_order", "confidence_order")


@dataclass(frozen=True)
class MatchConfig:
    test: str = "ks"
    p_thresh: float = 0.9
    bins: int = 10
    outlier_factor: float = 1.5
    top_k: int = 3
    base_order: str = "schema_order"

    def __post_init__(self):
        if self.test not in TEST_FUNCTIONS:
            raise DomainError(f"unknown test {self.test!r}")
        if not 0.0 <= self.p_thresh <= 1.0:
            raise DomainError("p_thresh must lie in [0, 1]")
        if self.bins < 1:
            raise DomainError("bins must be >= 1")
        if self.outlier_factor <= 0:
            raise DomainError("outlier_factor must be positive")
        if self.top_k < 1:
            raise DomainError("top_k must be >= 1")
        if self.base_order not in BASE_ORDERS:
            raise DomainError(f"base_order must be one of {BASE_ORDERS}")


@dataclass(frozen=True)
class PooledColumn:
    """A base column carrying values from several earlier releases.

    Parts stay separate so each release is cleaned and normalized on its
    own before the equal-weight pooling step.
    """

    name: str
    release: str
    parts: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class CandidateScore:
    base_column: str
    new_column: str
    test: str
    statistic: float | None
    p_value: float | None
    comparable: bool
    reason: str | None = None


@dataclass(frozen=True)
class MatchedPair:
    base: str | None
    new: str | None
    p_value: float | None = None
    statistic: float | None = None


@dataclass(frozen=True)
class MatchReport:
    config: MatchConfig
    pairs: tuple[MatchedPair, ...]
    candidates: dict[str, tuple[CandidateScore, ...]]
    unscored_base: tuple[str, ...] = ()
    unscored_new: tuple[str, ...] = ()


@dataclass(frozen=True)
class ChangeCounts:
    changed: int
    added: int
    removed: int


BaseColumn = NumericColumn | PooledColumn


def _parts(col: BaseColumn) -> tuple[tuple[float, ...], ...]:
    if isinstance(col, PooledColumn):
        return col.parts
    return (col.values,)


def _clean(values: Sequence[float], factor: float) -> list[float]:
    if not values:
        return []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return remove_outliers_iqr(values, factor)


def _null_distance(test: str, statistic: float) -> float:
    """How far a statistic sits from its no-difference value."""
    if test == "welch":
        return abs(statistic)
    if test == "f":
        return abs(math.log(statistic))
    return statistic


def _score_pair(
    base_name: str,
    base_parts: Sequence[Sequence[float]],
    new_name: str,
    new_values: Sequence[float],
    config: MatchConfig,
) -> CandidateScore:
    nonempty = [p for p in base_parts if p]
    if not nonempty or not new_values:
        return CandidateScore(base_name, new_name, config.test, None, None, False, "empty")
    pooled_base = [v for part in nonempty for v in part]
    edges = shared_edges(pooled_base, new_values, config.bins)
    base_sample = from_histogram(
        pool_years([normalize_histogram(build_histogram(p, edges)) for p in nonempty])
    )
    new_sample = from_histogram(
        pool_years([normalize_histogram(build_histogram(new_values, edges))])
    )
    try:
        result: TestResult = TEST_FUNCTIONS[config.test](base_sample, new_sample)
    except DegenerateVarianceError:
        return CandidateScore(
            base_name, new_name, config.test, None, None, False, "degenerate_variance"
        )
    except DomainError as exc:
        return CandidateScore(base_name, new_name, config.test, None, None, False, str(exc))
    return CandidateScore(
        base_name, new_name, config.test, result.statistic, result.p_value, True
    )


def _rank_key(c: CandidateScore):
    if not c.comparable:
        return (1, 0.0, 0.0, c.new_column)
    return (0, -c.p_value, _null_distance(c.test, c.statistic), c.new_column)


def rank_candidates(
    base: BaseColumn, news: Sequence[NumericColumn], config: MatchConfig | None = None
) -> list[CandidateScore]:
    """Score one base column against every candidate, best first.

    Ordering is p-value descending, then closeness of the statistic to its
    no-difference value, then candidate name; incomparable pairs sink to the
    bottom.  The list is threshold-free so Top-k reporting can show the best
    fits even when none clears the gate.
    """
    config = config or MatchConfig()
    base_parts = [_clean(p, config.outlier_factor) for p in _parts(base)]
    scores = [
        _score_pair(base.name, base_parts, new.name, _clean(new.values, config.outlier_factor), config)
        for new in news
    ]
    return sorted(scores, key=_rank_key)


def column_match(
    curr: Sequence[BaseColumn],
    new: Sequence[NumericColumn],
    config: MatchConfig | None = None,
    unscored_base: Sequence[str] = (),
    unscored_new: Sequence[str] = (),
) -> MatchReport:
    """Greedy threshold-gated matching of base columns onto new columns.

    Base columns are processed in schema order (or best-confidence-first
    when configured); each claims its best unclaimed candidate with
    p >= p_thresh, or stays unmatched without consuming anything.  Leftover
    new columns are reported as additions.
    """
    config = config or MatchConfig()
    for side, cols in (("curr", [c.name for c in curr]), ("new", [c.name for c in new])):
        if len(set(cols)) != len(cols):
            raise DomainError(f"duplicate column names in {side}")

    ranked = {c.name: tuple(rank_candidates(c, new, config)) for c in curr}

    order = list(curr)
    if config.base_order == "confidence_order":
        def best_p(col: BaseColumn) -> float:
            for cand in ranked[col.name]:
                if cand.comparable:
                    return cand.p_value
            return -1.0

        order.sort(key=best_p, reverse=True)  # stable: schema order breaks ties

    chosen: dict[str, CandidateScore | None] = {}
    consumed: set[str] = set()
    for col in order:
        pick = None
        for cand in ranked[col.name]:
            if not cand.comparable or cand.p_value < config.p_thresh:
                break  # ranked by p: nothing further can pass the gate
            if cand.new_column not in consumed:
                pick = cand
                break
        chosen[col.name] = pick
        if pick is not None:
            consumed.add(pick.new_column)

    pairs = []
    for col in curr:  # report rows follow the base schema order
        pick = chosen[col.name]
        if pick is None:
            pairs.append(MatchedPair(col.name, None))
        else:
            pairs.append(
                MatchedPair(col.name, pick.new_column, pick.p_value, pick.statistic)
            )
    for col in new:
        if col.name not in consumed:
            pairs.append(MatchedPair(None, col.name))

    return MatchReport(
        config=config,
        pairs=tuple(pairs),
        candidates=ranked,
        unscored_base=tuple(unscored_base),
        unscored_new=tuple(unscored_new),
    )


def classify_changes(report: MatchReport) -> ChangeCounts:
    """Counts of renamed, added, and removed columns in a match report."""
    changed = sum(
        1
        for p in report.pairs
        if p.base is not None and p.new is not None and p.base != p.new
    )
    added = sum(1 for p in report.pairs if p.base is None)
    removed = sum(1 for p in report.pairs if p.new is None)
    return ChangeCounts(changed=changed, added=added, removed=removed)


def classification_labels(report: MatchReport) -> tuple[dict[str, str], dict[str, str]]:
    """Per-column labels, one map per side (names may repeat across sides)."""
    base_labels: dict[str, str] = {}
    new_labels: dict[str, str] = {}
    for p in report.pairs:
        if p.base is not None and p.new is not None:
            base_labels[p.base] = "identical"
            new_labels[p.new] = "identical"
        elif p.base is not None:
            base_labels[p.base] = "no_data"
        else:
            new_labels[p.new] = "new"
    return base_labels, new_labels
