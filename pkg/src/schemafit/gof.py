"""Two-sample goodness-of-fit tests over binned column representations.

All four tests consume :class:`WeightedSample` values: ascending points with
positive real weights, produced by binning a column and re-expanding the
normalized histogram.  Weights play the role of tie multiplicities, so each
formula is the tie-aware analogue of its textbook form and reduces to it
exactly on unit counts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateVarianceError, DomainError
from .preprocess import Histogram
from .special import ks_survival, regularized_incomplete_beta


@dataclass(frozen=True)
class WeightedSample:
    """Binned sample: ascending points with positive weights.

    ``n_effective`` is the true tuple count behind the weights; for pooled
    multi-release samples the weights are rescaled averages, so it is carried
    separately to keep p-values tied to real sample sizes.
    """

    points: tuple[float, ...]
    counts: tuple[float, ...]
    n_effective: float

    def __post_init__(self):
        if not self.points or len(self.points) != len(self.counts):
            raise DomainError("points and counts must be nonempty and aligned")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise DomainError("points must be strictly increasing")
        if any(not (c > 0) or not math.isfinite(c) for c in self.counts):
            raise DomainError("counts must be positive and finite")
        if not (self.n_effective > 0 and math.isfinite(self.n_effective)):
            raise DomainError("n_effective must be positive and finite")
        total = sum(self.counts)
        if abs(total - self.n_effective) > 1e-9 * max(1.0, self.n_effective):
            raise DomainError(
                f"counts sum to {total}, expected n_effective={self.n_effective}"
            )


@dataclass(frozen=True)
class TestResult:
    test: str
    statistic: float
    p_value: float
    m: float
    n: float


def from_histogram(h: Histogram) -> WeightedSample:
    """Re-expand a histogram into bin midpoints weighted by tuple mass."""
    if h.normalized is not None:
        weights = [w * h.total for w in h.normalized]
    else:
        weights = [float(c) for c in h.counts]
    points = []
    counts = []
    for (lo, hi), w in zip(zip(h.edges, h.edges[1:]), weights):
        if w > 0:
            points.append((lo + hi) / 2.0)
            counts.append(w)
    if not points:
        raise DomainError("histogram carries no mass")
    return WeightedSample(tuple(points), tuple(counts), float(h.total))


def from_values(values: Sequence[float], n_effective: float | None = None) -> WeightedSample:
    """Collapse raw values into a weighted sample (ties become counts)."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DomainError("values must be nonempty")
    points, counts = np.unique(arr, return_counts=True)
    return WeightedSample(
        tuple(float(p) for p in points),
        tuple(float(c) for c in counts),
        float(arr.size if n_effective is None else n_effective),
    )


def _pooled_cumulative(
    x: WeightedSample, y: WeightedSample
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float, float]:
    """Cumulative x-weight, y-weight and pooled weight at each distinct
    pooled point, plus the two total weights."""
    xp = np.asarray(x.points)
    yp = np.asarray(y.points)
    grid = np.union1d(xp, yp)
    cum_x = np.concatenate(([0.0], np.cumsum(x.counts)))
    cum_y = np.concatenate(([0.0], np.cumsum(y.counts)))
    X = cum_x[np.searchsorted(xp, grid, side="right")]
    Y = cum_y[np.searchsorted(yp, grid, side="right")]
    return X, Y, X + Y, float(cum_x[-1]), float(cum_y[-1])


def ks_statistic(x: WeightedSample, y: WeightedSample) -> float:
    """Largest gap between the two cumulative fractions.

    Both step functions change only at sample points, so the supremum over
    the whole real line is attained on the pooled distinct points.
    """
    X, Y, _, m, n = _pooled_cumulative(x, y)
    return float(np.max(np.abs(X / m - Y / n)))


def ks_test(x: WeightedSample, y: WeightedSample) -> TestResult:
    d = ks_statistic(x, y)
    me, ne = x.n_effective, y.n_effective
    s = math.sqrt(me * ne / (me + ne))
    lam = (s + 0.12 + 0.11 / s) * d
    return TestResult("ks", d, ks_survival(lam), me, ne)


def ad_statistic(x: WeightedSample, y: WeightedSample) -> float:
    """Quadratic ECDF distance with tail weighting 1/(B(N-B)).

    Evaluated over distinct pooled points with pooled-mass weighting, the
    tie-aware analogue of the rank-sum form; the last pooled point drops out
    (its weight would divide by zero and its numerator is identically zero).
    """
    X, Y, B, m, n = _pooled_cumulative(x, y)
    big_n = m + n
    mass = np.diff(np.concatenate(([0.0], B)))
    X, Y, B, mass = X[:-1], Y[:-1], B[:-1], mass[:-1]
    if X.size == 0:
        return 0.0
    num = (big_n * X - m * B) ** 2 + (big_n * Y - n * B) ** 2
    terms = mass * num / (B * (big_n - B))
    return float(terms.sum() / (big_n * m * n))


#: Pooled sizes up to this are cheap to enumerate exhaustively; they are also
#: where the asymptotic standardization is least trustworthy.
_AD_EXACT_LIMIT = 10

#: Standard deviation of the limiting null law sum_j chi2_1 / (j(j+1)),
#: whose mean is 1: variance = 2 * sum 1/(j(j+1))^2 = 2(pi^2/3 - 3).
_AD_SIGMA_LIMIT = math.sqrt(2.0 * (math.pi**2 / 3.0 - 3.0))


def _ad_limit_sf(x: np.ndarray, terms: int = 120) -> np.ndarray:
    """Tail P(A >= x) of the limiting law A = sum_j chi2_1 / (j(j+1)).

    Numerical inversion of the characteristic function (Imhof's formula),
    truncated at `terms` eigenvalues with the discarded tail folded in as a
    mean shift; absolute accuracy is far below the 5e-2 the calibration
    contract needs.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    j = np.arange(1, terms + 1)
    lam = 1.0 / (j * (j + 1.0))
    tail_mean = 1.0 / (terms + 1.0)
    u = np.linspace(1e-8, 120.0, 6001)
    base_theta = 0.5 * np.arctan(lam[:, None] * u).sum(axis=0)
    log_rho = 0.25 * np.log1p((lam[:, None] * u) ** 2).sum(axis=0)
    damp = np.exp(-log_rho) / u
    out = np.empty(x.shape)
    for i, xi in enumerate(x):
        if xi <= 0:
            out[i] = 1.0
            continue
        theta = base_theta - 0.5 * (xi - tail_mean) * u
        integral = float(np.trapezoid(np.sin(theta) * damp, u))
        out[i] = min(1.0, max(0.0, 0.5 + integral / math.pi))
    return out


_AD_TABLE: tuple[np.ndarray, np.ndarray] | None = None


def _ad_logp_table() -> tuple[np.ndarray, np.ndarray]:
    """Dense (standardized statistic, log p) grid for interpolation.

    The grid stops where quadrature noise (about 1e-7 absolute) would start
    to dominate the tail; beyond it the exact asymptotic rate takes over.
    """
    global _AD_TABLE
    if _AD_TABLE is None:
        x = np.linspace(0.02, 12.0, 600)
        sf = np.clip(_ad_limit_sf(x), 1e-300, 1.0)
        t = (x - 1.0) / _AD_SIGMA_LIMIT
        _AD_TABLE = (t, np.minimum.accumulate(np.log(sf)))
    return _AD_TABLE


def _ad_pvalue(t: float) -> float:
    t_grid, logp = _ad_logp_table()
    if t <= t_grid[0]:
        return 1.0
    if t >= t_grid[-1]:
        # log-tail slope is exactly -1 per unit of the unstandardized
        # statistic (largest eigenvalue 1/2 of the limiting law).
        return math.exp(logp[-1] - _AD_SIGMA_LIMIT * (t - t_grid[-1]))
    p = math.exp(float(np.interp(t, t_grid, logp)))
    return min(1.0, max(0.0, p))


def _ad_variance(big_n: int, m: float, n: float) -> float:
    """Null variance of the rank-sum statistic (two samples of sizes m, n)."""
    h_partial = np.cumsum(1.0 / np.arange(big_n - 1, 1, -1))
    h = h_partial[-1] + 1.0
    g = float((h_partial / np.arange(2, big_n)).sum())
    hh = 1.0 / m + 1.0 / n
    k = 2.0
    a = (4 * g - 6) * (k - 1) + (10 - 6 * g) * hh
    b = (2 * g - 4) * k**2 + 8 * h * k + (2 * g - 14 * h - 4) * hh - 8 * h + 4 * g - 6
    c = (6 * h + 2 * g - 2) * k**2 + (4 * h - 4 * g + 6) * k + (2 * h - 6) * hh + 4 * h
    d = (2 * h + 6) * k**2 - 4 * h * k
    return (a * big_n**3 + b * big_n**2 + c * big_n + d) / (
        (big_n - 1.0) * (big_n - 2.0) * (big_n - 3.0)
    )


def ad_test(x: WeightedSample, y: WeightedSample) -> TestResult:
    stat = ad_statistic(x, y)
    me, ne = x.n_effective, y.n_effective
    pooled = int(round(me + ne))
    if pooled <= _AD_EXACT_LIMIT:
        p = permutation_pvalue(x, y, ad_statistic, iterations=10000, seed=0)
        return TestResult("ad", stat, p, me, ne)
    # The rank-sum scaling of the same statistic is (N/2) times ours; its
    # null mean is exactly 1 and its variance has a closed form, so the
    # standardized value can be priced on the limiting null law.
    rank_sum_stat = (me + ne) / 2.0 * stat
    sigma = math.sqrt(_ad_variance(pooled, me, ne))
    t = (rank_sum_stat - 1.0) / sigma
    p = _ad_pvalue(t)
    return TestResult("ad", stat, p, me, ne)


def weighted_moments(s: WeightedSample) -> tuple[float, float]:
    """Mean and unbiased variance of a weighted sample.

    The variance denominator is n_effective - 1, matching the plain sample
    variance when counts are unit.
    """
    if s.n_effective <= 1:
        raise DomainError("variance undefined for n_effective <= 1")
    points = np.asarray(s.points)
    counts = np.asarray(s.counts)
    total = counts.sum()
    mean = float((counts * points).sum() / total)
    ssq = float((counts * (points - mean) ** 2).sum())
    variance = ssq * (s.n_effective / total) / (s.n_effective - 1.0)
    return mean, variance


def f_test(x: WeightedSample, y: WeightedSample) -> TestResult:
    _, vx = weighted_moments(x)
    _, vy = weighted_moments(y)
    if vx == 0.0 or vy == 0.0:
        raise DegenerateVarianceError("variance ratio undefined for a constant sample")
    stat = vx / vy
    d1 = x.n_effective - 1.0
    d2 = y.n_effective - 1.0
    z = d1 * stat / (d1 * stat + d2)
    cdf = regularized_incomplete_beta(d1 / 2.0, d2 / 2.0, z)
    p = 2.0 * min(cdf, 1.0 - cdf)
    return TestResult("f", stat, min(1.0, max(0.0, p)), x.n_effective, y.n_effective)


def welch_test(x: WeightedSample, y: WeightedSample) -> TestResult:
    mx, vx = weighted_moments(x)
    my, vy = weighted_moments(y)
    me, ne = x.n_effective, y.n_effective
    se_sq = vx / me + vy / ne
    if se_sq == 0.0:
        raise DegenerateVarianceError("mean difference unscalable: both variances zero")
    stat = (mx - my) / math.sqrt(se_sq)
    df = se_sq**2 / ((vx / me) ** 2 / (me - 1.0) + (vy / ne) ** 2 / (ne - 1.0))
    # Two-sided tail of the Student-t distribution in closed beta form.
    p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + stat**2))
    return TestResult("welch", stat, min(1.0, max(0.0, p)), me, ne)


def _split_statistics(
    pooled_sorted: np.ndarray, m: int, n: int, labels: np.ndarray, which: str
) -> np.ndarray:
    """Statistic of each relabeling, one row of `labels` per split.

    `labels[r, i]` marks pooled slot i (ascending order) as belonging to x.
    Both statistics depend on a split only through the cumulative x-count at
    each distinct pooled value, so one row-wise cumsum prices every split.
    """
    big_n = m + n
    group_end = np.nonzero(
        np.concatenate([pooled_sorted[1:] != pooled_sorted[:-1], [True]])
    )[0]
    b = group_end + 1.0
    cum_x = np.cumsum(labels, axis=1)[:, group_end]
    if which == "ks":
        return np.max(np.abs(cum_x / m - (b - cum_x) / n), axis=1)
    if which == "ad":
        if b.size == 1:
            return np.zeros(labels.shape[0])
        mass = np.diff(np.concatenate([[0.0], b]))[:-1]
        bu = b[:-1]
        xu = cum_x[:, :-1]
        num = (big_n * xu - m * bu) ** 2 + (big_n * (bu - xu) - n * bu) ** 2
        return (mass * num / (bu * (big_n - bu))).sum(axis=1) / (big_n * m * n)
    raise DomainError(f"no vectorized form for statistic {which!r}")


def permutation_pvalue(
    x: WeightedSample,
    y: WeightedSample,
    statistic_fn: Callable[[WeightedSample, WeightedSample], float],
    iterations: int = 10000,
    seed: int = 0,
) -> float:
    """Relabeling p-value: fraction of splits whose statistic reaches the
    observed one.

    Counts are rounded to integers and expanded to raw values.  Pooled sizes
    up to 10 are enumerated exhaustively (iterations is then ignored);
    larger pools are sampled with a seeded generator.  The two built-in
    statistics run through a vectorized engine; anything else falls back to
    a per-split Python loop.
    """
    xv = np.repeat(x.points, np.rint(x.counts).astype(int))
    yv = np.repeat(y.points, np.rint(y.counts).astype(int))
    if xv.size == 0 or yv.size == 0:
        raise DomainError("a sample vanished after rounding counts")
    pooled = np.concatenate([xv, yv])
    size_x = xv.size
    observed = statistic_fn(from_values(xv), from_values(yv))
    tol = 1e-12
    if pooled.size <= _AD_EXACT_LIMIT:
        hits = 0
        total = 0
        index_set = frozenset(range(pooled.size))
        for chosen in itertools.combinations(range(pooled.size), size_x):
            rest = sorted(index_set.difference(chosen))
            stat = statistic_fn(
                from_values(pooled[list(chosen)]), from_values(pooled[rest])
            )
            hits += stat >= observed - tol
            total += 1
        return hits / total
    if iterations <= 0:
        raise DomainError("iterations must be positive for sampled permutation")
    rng = np.random.default_rng(seed)
    which = {id(ks_statistic): "ks", id(ad_statistic): "ad"}.get(id(statistic_fn))
    if which is not None:
        pooled_sorted = np.sort(pooled)
        base = np.zeros(pooled.size, dtype=bool)
        base[:size_x] = True
        hits = 0
        chunk = 1024
        for start in range(0, iterations, chunk):
            rows = min(chunk, iterations - start)
            labels = rng.permuted(np.tile(base, (rows, 1)), axis=1)
            stats = _split_statistics(pooled_sorted, size_x, yv.size, labels, which)
            hits += int((stats >= observed - tol).sum())
        return hits / iterations
    hits = 0
    for _ in range(iterations):
        perm = rng.permutation(pooled)
        stat = statistic_fn(from_values(perm[:size_x]), from_values(perm[size_x:]))
        hits += stat >= observed - tol
    return hits / iterations
