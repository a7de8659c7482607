"""Dense-regime analysis: distributions of occurrences per day.

For frequent words the gap statistics degenerate, so the object of
interest becomes p(x, k): the probability that a word totalling k
occurrences shows x of them on a given day.  Individual classes are too
thin at large k, hence each word's daily counts are standardized to

    xt = (x - k/T) / sigma

with sigma the word's own (population) daily standard deviation, and
the standardized values pooled over a k-range.  A uniform box-allocation
generator provides the matched independent-events reference.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .fileio import atomic_writer
from .matrix import WordDayMatrix
from .seeding import substream


@dataclass
class DailyCountDistribution:
    """Histogram of occurrences-per-day for one word (zero days included)."""

    k: int
    horizon: int
    probs: np.ndarray  # p(x) for x = 0 .. len(probs)-1
    mean: float
    std: float
    degenerate: bool  # constant daily count, zero spread

    @property
    def support(self) -> np.ndarray:
        return np.arange(len(self.probs))


def daily_count_distribution(series, k: int, horizon: int) -> DailyCountDistribution:
    """p(x, k) for one word whose day counts sum to ``k``."""
    x = _dense_series(series, horizon)
    total = int(x.sum())
    if total != k:
        raise ValueError(f"series total {total} does not match k={k}")
    hist = np.bincount(x)
    probs = hist / horizon
    mean = k / horizon
    std = float(np.sqrt(np.mean((x - mean) ** 2)))
    return DailyCountDistribution(
        k=k, horizon=horizon, probs=probs, mean=mean, std=std, degenerate=std == 0.0,
    )


def rescaled_values(series, k: int, horizon: int) -> np.ndarray | None:
    """Standardized day counts (x - k/T)/sigma, or None when sigma is 0."""
    x = _dense_series(series, horizon).astype(float)
    mean = k / horizon
    std = np.sqrt(np.mean((x - mean) ** 2))
    if std == 0.0:
        return None
    return (x - mean) / std


@dataclass
class RescaledCountDistribution:
    """Pooled standardized daily counts over a k-range, binned for display."""

    k_lo: int
    k_hi: int
    bin_edges: np.ndarray
    density: np.ndarray
    word_count: int
    skipped_words: int  # zero-spread words that contributed nothing
    value_count: int
    clipped_count: int  # standardized values outside the binning window

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def tail_mass(self, threshold: float) -> float:
        """Integrated density of bins entirely above ``threshold``."""
        widths = np.diff(self.bin_edges)
        sel = self.bin_edges[:-1] >= threshold
        return float(np.sum(self.density[sel] * widths[sel]))


def pool_rescaled(matrix: WordDayMatrix, k_lo: int, k_hi: int,
                  bin_width: float = 0.25, window: tuple[float, float] = (-6.0, 10.0)) -> RescaledCountDistribution:
    """Pool standardized daily counts of every word with total in [k_lo, k_hi]."""
    if k_lo > k_hi:
        raise ValueError(f"empty range: k_lo {k_lo} > k_hi {k_hi}")
    lo, hi = window
    edges = np.arange(lo, hi + bin_width / 2, bin_width)
    values = []
    used = skipped = 0
    for word in matrix.words():
        k = matrix.total(word)
        if not k_lo <= k <= k_hi:
            continue
        xt = rescaled_values(matrix.series(word), k, matrix.horizon)
        if xt is None:
            skipped += 1
            continue
        used += 1
        values.append(xt)
    if values:
        pooled = np.concatenate(values)
        counts, _ = np.histogram(pooled, bins=edges)
        total_in = counts.sum()
        density = counts / (total_in * bin_width) if total_in else np.zeros(edges.size - 1)
        clipped = int(pooled.size - total_in)
        n_values = int(pooled.size)
    else:
        density = np.zeros(edges.size - 1)
        clipped = n_values = 0
    return RescaledCountDistribution(
        k_lo=k_lo, k_hi=k_hi, bin_edges=edges, density=density,
        word_count=used, skipped_words=skipped,
        value_count=n_values, clipped_count=clipped,
    )


def poisson_null_ensemble(k: int, horizon: int, n_words: int, seed: int,
                          name_prefix: str = "null") -> WordDayMatrix:
    """Words with exactly ``k`` events each dropped uniformly into day boxes.

    Deterministic given the seed: word i draws from its own substream, so
    the result is independent of generation order.
    """
    if k < 1 or n_words < 1:
        raise ValueError("k and n_words must be >= 1")
    matrix = WordDayMatrix(horizon=horizon)
    width = len(str(n_words - 1)) if n_words > 1 else 1
    for i in range(n_words):
        rng = substream(seed, i)
        counts = rng.multinomial(k, np.full(horizon, 1.0 / horizon))
        days = np.nonzero(counts)[0]
        matrix.counts[f"{name_prefix}k{k}_{i:0{width}d}"] = {int(d): int(counts[d]) for d in days}
    return matrix


def matched_poisson_null(matrix: WordDayMatrix, k_lo: int, k_hi: int, seed: int) -> WordDayMatrix:
    """One box-allocation word per real word in the k-range, same totals.

    Word order is sorted for determinism; substream index follows that
    order.
    """
    null = WordDayMatrix(horizon=matrix.horizon)
    selected = sorted(w for w in matrix.words() if k_lo <= matrix.total(w) <= k_hi)
    p = np.full(matrix.horizon, 1.0 / matrix.horizon)
    for i, word in enumerate(selected):
        k = matrix.total(word)
        rng = substream(seed, i)
        counts = rng.multinomial(k, p)
        days = np.nonzero(counts)[0]
        null.counts[f"null_{word}"] = {int(d): int(counts[d]) for d in days}
    return null


@dataclass
class SigmaScalingRow:
    k: int
    n_words: int
    sigma_rel: float  # mean of sigma / <x> over the class
    sigma_abs: float  # mean of sigma over the class


@dataclass
class SigmaScalingTable:
    """Relative and absolute spread of daily counts versus k.

    For independent uniform allocation sigma/<x> falls like k**-1/2
    while sigma itself grows like k**+1/2; both exponents are reported
    so either reading of the spread-versus-frequency claim can be
    checked.
    """

    rows: list[SigmaScalingRow]
    exponent_rel: float
    exponent_abs: float


def sigma_scaling(matrix: WordDayMatrix, k_values=None, min_words: int = 1) -> SigmaScalingTable:
    """Fit log-log slopes of spread against k over exact-k classes."""
    by_k: dict[int, list[str]] = {}
    for word in matrix.words():
        by_k.setdefault(matrix.total(word), []).append(word)
    ks = sorted(by_k) if k_values is None else sorted(set(k_values) & by_k.keys())
    rows = []
    for k in ks:
        words = by_k[k]
        if len(words) < min_words:
            continue
        rels, abss = [], []
        for w in words:
            d = daily_count_distribution(matrix.series(w), k, matrix.horizon)
            if d.degenerate:
                continue
            rels.append(d.std / d.mean)
            abss.append(d.std)
        if rels:
            rows.append(SigmaScalingRow(k=k, n_words=len(rels),
                                        sigma_rel=float(np.mean(rels)), sigma_abs=float(np.mean(abss))))
    if len(rows) < 3:
        raise ValueError("need >= 3 populated k classes to fit a scaling exponent")
    kk = np.array([r.k for r in rows], dtype=float)
    if kk.max() / kk.min() < 10.0:
        raise ValueError("k values must span at least a decade")
    lk = np.log(kk)
    exponent_rel = float(np.polyfit(lk, np.log([r.sigma_rel for r in rows]), 1)[0])
    exponent_abs = float(np.polyfit(lk, np.log([r.sigma_abs for r in rows]), 1)[0])
    return SigmaScalingTable(rows=rows, exponent_rel=exponent_rel, exponent_abs=exponent_abs)


def _dense_series(series, horizon: int) -> np.ndarray:
    if isinstance(series, np.ndarray):
        if series.shape != (horizon,):
            raise ValueError(f"expected a length-{horizon} vector")
        return series.astype(np.int64)
    out = np.zeros(horizon, dtype=np.int64)
    for day, c in series.items():
        if not 0 <= day < horizon:
            raise ValueError(f"day {day} outside horizon")
        out[day] = c
    return out


def write_xtilde_csv(path, empirical: RescaledCountDistribution,
                     null: RescaledCountDistribution) -> None:
    """Write ``xtilde,density_empirical,density_null`` on the shared grid."""
    if empirical.bin_edges.shape != null.bin_edges.shape or not np.allclose(empirical.bin_edges, null.bin_edges):
        raise ValueError("empirical and null distributions use different bins")
    with atomic_writer(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["xtilde", "density_empirical", "density_null"])
        for c, de, dn in zip(empirical.bin_centers, empirical.density, null.density):
            writer.writerow([f"{c:.12g}", f"{de:.12g}", f"{dn:.12g}"])


def write_sigma_scaling_csv(path, table: SigmaScalingTable) -> None:
    with atomic_writer(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "n_words", "sigma_rel", "sigma_abs"])
        for r in table.rows:
            writer.writerow([r.k, r.n_words, f"{r.sigma_rel:.12g}", f"{r.sigma_abs:.12g}"])
