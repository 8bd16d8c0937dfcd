"""Per-column preprocessing: IQR outlier removal, shared-grid histograms, pooling.

The pipeline for one compared pair is: clean each side with a single IQR
pass, lay a common equal-width grid over the union range, bin each side on
that grid, and normalize by tuple count.  Multi-release bases additionally
pool their per-release normalized histograms with equal year weighting.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class QuartileSummary:
    q1: float
    q3: float
    iqr: float
    lower_fence: float
    upper_fence: float


@dataclass(frozen=True)
class Histogram:
    """Binned sample on a fixed grid.

    ``normalized`` holds per-bin weights summing to 1.  For a single-release
    histogram each weight is count/total; a pooled histogram instead carries
    the equal-weight mean across releases, so its weights are decoupled from
    its (summed) counts.
    """

    edges: tuple[float, ...]
    counts: tuple[int, ...]
    total: int
    normalized: tuple[float, ...] | None = None


def _as_array(values: Iterable[float], what: str) -> np.ndarray:
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise DomainError(f"{what} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} must be finite")
    return arr


def quartiles(values: Iterable[float], factor: float = 1.5) -> QuartileSummary:
    """First and third quartiles with IQR fences.

    Quartiles interpolate linearly at h = (n-1)p on the sorted sample, the
    same rule as ``numpy.quantile`` defaults.
    """
    arr = _as_array(values, "values")
    if factor <= 0:
        raise DomainError("factor must be positive")
    q1, q3 = (float(q) for q in np.quantile(arr, [0.25, 0.75]))
    iqr = q3 - q1
    return QuartileSummary(
        q1=q1,
        q3=q3,
        iqr=iqr,
        lower_fence=q1 - factor * iqr,
        upper_fence=q3 + factor * iqr,
    )


def remove_outliers_iqr(values: Sequence[float], factor: float = 1.5) -> list[float]:
    """Drop values outside the IQR fences of the input sample.

    One pass only: fences come from the original sample and are not
    recomputed after removal.  Input order is preserved.
    """
    summary = quartiles(values, factor)
    kept = [
        float(v) for v in values if summary.lower_fence <= v <= summary.upper_fence
    ]
    if not kept:
        warnings.warn(
            "IQR filter removed every value; treat the column as empty",
            RuntimeWarning,
            stacklevel=2,
        )
    return kept


def shared_edges(
    x: Iterable[float], y: Iterable[float], bins: int = 10
) -> tuple[float, ...]:
    """Equal-width bin edges spanning the union range of both samples.

    When the union range collapses to a point v, returns the single-bin grid
    (v, v+1) so all mass lands in one bin on both sides.
    """
    if bins < 1:
        raise DomainError("bins must be a positive integer")
    ax = _as_array(x, "x")
    ay = _as_array(y, "y")
    lo = min(ax.min(), ay.min())
    hi = max(ax.max(), ay.max())
    if lo == hi:
        return (float(lo), float(lo) + 1.0)
    return tuple(float(e) for e in np.linspace(lo, hi, bins + 1))


def build_histogram(values: Sequence[float], edges: Sequence[float]) -> Histogram:
    """Bin values on a fixed grid; out-of-range values clamp into the end bins.

    Bins are left-closed with the last bin closed on both sides.  Clamping
    (rather than dropping) keeps sum(counts) equal to the tuple count even
    when a release exceeds the pooled range.
    """
    edges_arr = np.asarray(edges, dtype=float)
    if edges_arr.ndim != 1 or edges_arr.size < 2 or not np.all(np.diff(edges_arr) > 0):
        raise DomainError("edges must be strictly increasing with at least one bin")
    arr = _as_array(values, "values")
    clamped = np.clip(arr, edges_arr[0], edges_arr[-1])
    counts, _ = np.histogram(clamped, bins=edges_arr)
    return Histogram(
        edges=tuple(float(e) for e in edges_arr),
        counts=tuple(int(c) for c in counts),
        total=int(arr.size),
    )


def normalize_histogram(h: Histogram) -> Histogram:
    """Attach per-bin weights count/total; counts and total are preserved."""
    if h.total <= 0:
        raise DomainError("cannot normalize a histogram with no tuples")
    return replace(h, normalized=tuple(c / h.total for c in h.counts))


def pool_years(histograms: Sequence[Histogram]) -> Histogram:
    """Combine normalized same-grid histograms with equal year weighting.

    Pooled weights are the arithmetic mean of the per-release weights, so a
    small release counts as much as a large one.  Counts and totals are
    summed and carried along as the effective pooled sample size.
    """
    if not histograms:
        raise DomainError("nothing to pool")
    first = histograms[0]
    for h in histograms:
        if h.edges != first.edges:
            raise DomainError("pooled histograms must share identical edges")
        if h.normalized is None:
            raise DomainError("pooled histograms must be normalized")
    weights = np.mean([h.normalized for h in histograms], axis=0)
    counts = np.sum([h.counts for h in histograms], axis=0)
    return Histogram(
        edges=first.edges,
        counts=tuple(int(c) for c in counts),
        total=sum(h.total for h in histograms),
        normalized=tuple(float(w) for w in weights),
    )
