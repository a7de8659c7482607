"""Sparse-regime analysis: waiting times between the days a word occurs.

For one word the event-days are the days with at least one containing
post; the waiting times are the integer day gaps between consecutive
event-days (>= 1, open intervals at both horizon ends discarded).  Class
statistics pool the gaps of every word in a frequency class.

Day binning fixes the survival convention used throughout: for an
integer-valued gap, the empirical exclusive survival P(tau > t) at
integer t is the right-continuous counterpart of a continuous survival
S(t).  Concretely, a daily-thinned Poisson process of rate r has gap law
P(tau > t) = exp(-r*t) exactly, so model comparisons and fits anchor
S(t) to P(tau > t), i.e. to R(t+1) in terms of the inclusive risk
R(t) = P(tau >= t).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import optimize

from . import stretched
from .ensembles import Ensemble, EnsembleIndex, select_dilute
from .errors import EmptySampleError, FitDidNotConverge
from .fileio import atomic_writer
from .matrix import WordDayMatrix
from .seeding import substream

RISK_FLOOR = 1e-4


def waiting_times(series: Mapping[int, int], horizon: int) -> np.ndarray:
    """Day gaps between consecutive event-days of one word.

    ``series`` maps day index to a positive post count; multiplicity
    within a day is ignored.  A word with fewer than two event-days
    yields an empty sample.
    """
    days = sorted(d for d, c in series.items() if c >= 1)
    if days and not (0 <= days[0] and days[-1] < horizon):
        raise ValueError("event day outside horizon")
    if len(days) < 2:
        return np.empty(0, dtype=np.int64)
    return np.diff(np.asarray(days, dtype=np.int64))


def pooled_waiting_times(words: Iterable[str], matrix: WordDayMatrix) -> np.ndarray:
    """Concatenated waiting times of ``words``, in the given word order."""
    parts = [waiting_times(matrix.series(w), matrix.horizon) for w in words]
    parts = [p for p in parts if p.size]
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(parts)


@dataclass
class WaitingTimeDistribution:
    """Normalized gap histogram of one class (k is None for pooled data)."""

    k: int | None
    horizon: int
    f: np.ndarray  # probability of tau = 1 .. horizon-1
    sample_count: int

    @property
    def support(self) -> np.ndarray:
        return np.arange(1, self.horizon, dtype=np.int64)

    def mean(self) -> float:
        return float(np.dot(self.support, self.f))

    def second_moment(self) -> float:
        return float(np.dot(self.support.astype(float) ** 2, self.f))


def distribution_from_sample(taus: np.ndarray, horizon: int, k: int | None = None) -> WaitingTimeDistribution:
    taus = np.asarray(taus, dtype=np.int64)
    if taus.size == 0:
        raise EmptySampleError("no waiting times to build a distribution from")
    if taus.min() < 1 or taus.max() > horizon - 1:
        raise ValueError("waiting times must lie in [1, horizon-1]")
    hist = np.bincount(taus, minlength=horizon)[1:horizon]
    f = hist / hist.sum()
    return WaitingTimeDistribution(k=k, horizon=horizon, f=f, sample_count=int(taus.size))


def ensemble_distribution(ensemble: Ensemble, matrix: WordDayMatrix) -> WaitingTimeDistribution:
    """Pooled waiting-time distribution of one frequency class."""
    if ensemble.k >= matrix.horizon:
        raise ValueError(f"class k={ensemble.k} is not sparse for horizon {matrix.horizon}")
    taus = pooled_waiting_times(ensemble.words, matrix)
    if taus.size == 0:
        raise EmptySampleError(f"class k={ensemble.k} has no waiting times")
    return distribution_from_sample(taus, matrix.horizon, k=ensemble.k)


def aggregate_distribution(index: EnsembleIndex, matrix: WordDayMatrix) -> WaitingTimeDistribution:
    """Pool waiting times across all sparse classes without rescaling.

    Deliberately mixes heterogeneous rates: the resulting tail is fatter
    than any single class's, which is the averaging artifact this
    distribution exists to exhibit.
    """
    dilute = select_dilute(index)
    if not dilute:
        raise EmptySampleError("no sparse classes to aggregate")
    parts = [pooled_waiting_times(e.words, matrix) for e in dilute]
    parts = [p for p in parts if p.size]
    if not parts:
        raise EmptySampleError("sparse classes contain no waiting times")
    return distribution_from_sample(np.concatenate(parts), matrix.horizon, k=None)


@dataclass
class RiskFunction:
    """Tail sums R(t) = sum_{tau >= t} f(tau) for t = 1 .. horizon-1."""

    horizon: int
    values: np.ndarray
    sample_count: int

    @property
    def support(self) -> np.ndarray:
        return np.arange(1, self.horizon, dtype=np.int64)


def risk_function(dist: WaitingTimeDistribution) -> RiskFunction:
    values = dist.f[::-1].cumsum()[::-1]
    return RiskFunction(horizon=dist.horizon, values=values, sample_count=dist.sample_count)


@dataclass
class RescaledRiskCurve:
    """Risk values over t_R = t * k / horizon; values unchanged."""

    k: int
    horizon: int
    t_r: np.ndarray
    values: np.ndarray


def rescale_time(risk: RiskFunction, k: int, horizon: int | None = None) -> RescaledRiskCurve:
    """Map the support t -> t * k / horizon so classes share one clock."""
    if k < 1:
        raise ValueError("k must be >= 1")
    horizon = risk.horizon if horizon is None else horizon
    t_r = risk.support.astype(float) * k / horizon
    return RescaledRiskCurve(k=k, horizon=horizon, t_r=t_r, values=risk.values.copy())


@dataclass
class RescaledSurvivalCurve:
    """Exclusive survival P(tau > t) at t_R = t * k / horizon, anchored at (0, 1)."""

    k: int
    t_r: np.ndarray
    values: np.ndarray


def rescaled_survival(dist: WaitingTimeDistribution, k: int | None = None,
                      t_r_max: float = 3.0) -> RescaledSurvivalCurve:
    """Rescaled right-continuous survival curve used for collapse checks."""
    k = dist.k if k is None else k
    if k is None or k < 1:
        raise ValueError("a positive k is required to rescale")
    scale = k / dist.horizon
    t_max = min(int(np.floor(t_r_max / scale)), dist.horizon - 2)
    risk = risk_function(dist).values
    ts = np.arange(0, t_max + 1)
    values = np.empty(ts.size)
    values[0] = 1.0
    values[1:] = risk[ts[1:]]  # risk[t] = R(t+1) = P(tau > t)
    return RescaledSurvivalCurve(k=k, t_r=ts * scale, values=values)


def max_exponential_deviation(curve: RescaledSurvivalCurve) -> float:
    """Sup distance between the curve and exp(-t_R) at its support points."""
    return float(np.max(np.abs(curve.values - np.exp(-curve.t_r))))


def max_pairwise_deviation(curves: Sequence[RescaledSurvivalCurve],
                           t_r_max: float = 3.0, step: float = 0.05) -> float:
    """Largest sup distance between any two curves on a common t_R grid.

    Curves are interpolated log-linearly (exact for exponential-shaped
    survivals) onto the grid before comparison.
    """
    grid = np.arange(0.0, t_r_max + step / 2, step)
    interped = []
    for c in curves:
        mask = c.values > 0
        interped.append(np.exp(np.interp(grid, c.t_r[mask], np.log(c.values[mask]))))
    worst = 0.0
    for i in range(len(interped)):
        for j in range(i + 1, len(interped)):
            worst = max(worst, float(np.max(np.abs(interped[i] - interped[j]))))
    return worst


@dataclass
class StretchedExpFit:
    """Fitted parameters of the stretched-exponential gap law."""

    a: float
    nu: float
    C: float
    residual: float
    n_points: int


def fit_stretched_exponential(risk: RiskFunction, floor: float = RISK_FLOOR,
                              max_nfev: int = 200) -> StretchedExpFit:
    """Fit the continuous survival S(t) to the empirical risk function.

    Least squares on log R over support points with R above ``floor``,
    weighted by the binomial precision of each point,
    sqrt(n R / (1 - R)).  The model is evaluated at t-1 so that its
    exclusive-survival convention matches the empirical one (exact for
    daily-thinned Poisson data).  The normalization C follows from
    (a, nu).  Raises :class:`FitDidNotConverge` (carrying the best
    iterate) if no start converges.
    """
    n = risk.sample_count
    R = risk.values
    ts = risk.support.astype(float)
    mask = (R > floor) & (R < 1.0 - 0.5 / max(n, 1))
    if mask.sum() < 10:
        raise EmptySampleError(f"need >= 10 usable risk points above {floor}, got {int(mask.sum())}")
    ts, R = ts[mask], R[mask]
    log_r = np.log(R)
    weights = np.sqrt(n * R / (1.0 - R))
    weights /= weights.max()

    def residuals(x):
        a, nu = np.exp(x[0]), x[1]
        s = stretched.survival(ts - 1.0, a, nu)
        return weights * (np.log(np.maximum(s, 1e-300)) - log_r)

    a0 = 1.0 / max(float(np.interp(np.exp(-1.0), R[::-1], ts[::-1])), 1.0)
    best = None
    converged = False
    for nu0 in (0.3, 0.5, 0.7, 1.0, 1.5):
        sol = optimize.least_squares(
            residuals, x0=[np.log(a0), nu0],
            bounds=([-30.0, 0.02], [5.0, 2.0]), max_nfev=max_nfev,
        )
        if best is None or sol.cost < best.cost:
            best = sol
        converged = converged or sol.status > 0
    a, nu = float(np.exp(best.x[0])), float(best.x[1])
    plain = np.log(np.maximum(stretched.survival(ts - 1.0, a, nu), 1e-300)) - log_r
    fit = StretchedExpFit(
        a=a, nu=nu, C=stretched.normalization(a, nu),
        residual=float(np.sqrt(np.mean(plain**2))), n_points=int(ts.size),
    )
    if not converged:
        raise FitDidNotConverge("no optimizer start converged within its budget", best=fit)
    return fit


@dataclass
class ZetaStat:
    """Dispersion ratio of a waiting-time sample: <tau^2> / <tau>^2.

    2 for exponential gaps, 10/3 for the nu=1/2 stretched law, 1 when
    all gaps are equal; >= 1 always.
    """

    zeta: float
    mean_tau: float
    second_moment: float
    sample_count: int


def zeta(sample_or_dist) -> ZetaStat:
    """Moment ratio of a raw gap sample or of a gap distribution."""
    if isinstance(sample_or_dist, WaitingTimeDistribution):
        d = sample_or_dist
        if d.sample_count < 2:
            raise EmptySampleError("zeta needs at least 2 waiting times")
        m1, m2, count = d.mean(), d.second_moment(), d.sample_count
    else:
        taus = np.asarray(sample_or_dist, dtype=float)
        if taus.size < 2:
            raise EmptySampleError("zeta needs at least 2 waiting times")
        m1, m2, count = float(taus.mean()), float(np.mean(taus**2)), int(taus.size)
    return ZetaStat(zeta=m2 / m1**2, mean_tau=m1, second_moment=m2, sample_count=count)


@dataclass
class MeanWaitingCheck:
    """How far a class mean gap sits from the horizon/k prediction."""

    k: int
    mean_tau: float
    expected: float
    deviation: float  # |<tau> - T/k| * k / T
    sample_count: int
    low_sample: bool


def mean_waiting_check(dist: WaitingTimeDistribution, k: int | None = None,
                       low_sample_below: int = 10) -> MeanWaitingCheck:
    k = dist.k if k is None else k
    if k is None or k < 1:
        raise ValueError("a positive k is required")
    expected = dist.horizon / k
    mean_tau = dist.mean()
    return MeanWaitingCheck(
        k=k, mean_tau=mean_tau, expected=expected,
        deviation=abs(mean_tau - expected) / expected,
        sample_count=dist.sample_count,
        low_sample=dist.sample_count < low_sample_below,
    )


@dataclass
class ZetaRow:
    k: int
    zeta: float
    zeta_err: float
    n_k: int
    sample_count: int


def zeta_by_ensemble(index: EnsembleIndex, matrix: WordDayMatrix,
                     k_lo: int | None = None, k_hi: int | None = None,
                     min_sample: int = 2, n_boot: int = 200, seed: int = 0) -> list[ZetaRow]:
    """Per-class dispersion ratio with a bootstrap error over words.

    Words are resampled with replacement within each class (``n_boot``
    resamples, one deterministic substream per class).
    """
    rows = []
    for k in index.ks():
        if k >= index.horizon:
            continue
        if k_lo is not None and k < k_lo:
            continue
        if k_hi is not None and k > k_hi:
            continue
        ens = index[k]
        per_word = [waiting_times(matrix.series(w), matrix.horizon) for w in ens.words]
        per_word = [p for p in per_word if p.size]
        if not per_word:
            continue
        pooled = np.concatenate(per_word)
        if pooled.size < min_sample:
            continue
        z = zeta(pooled)
        err = 0.0
        if len(per_word) > 1 and n_boot > 0:
            rng = substream(seed, k)
            zs = np.empty(n_boot)
            for b in range(n_boot):
                pick = rng.integers(0, len(per_word), size=len(per_word))
                boot = np.concatenate([per_word[i] for i in pick])
                zs[b] = np.mean(boot.astype(float) ** 2) / np.mean(boot) ** 2 if boot.size >= 2 else np.nan
            err = float(np.nanstd(zs))
        rows.append(ZetaRow(k=k, zeta=z.zeta, zeta_err=err, n_k=ens.n_k, sample_count=z.sample_count))
    return rows


def log_binned_density(taus: np.ndarray, factor: float = 1.25) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Histogram a gap sample into logarithmic bins for display.

    Returns (lower, upper, center, density) arrays with empty bins
    dropped; statistics should always use the unbinned sample.
    """
    if factor <= 1:
        raise ValueError("bin factor must exceed 1")
    taus = np.asarray(taus, dtype=float)
    if taus.size == 0:
        raise EmptySampleError("nothing to bin")
    n_bins = int(np.ceil(np.log(taus.max() + 1) / np.log(factor))) + 1
    edges = np.power(factor, np.arange(n_bins + 1))
    counts, _ = np.histogram(taus, bins=edges)
    widths = np.diff(edges)
    density = counts / (taus.size * widths)
    keep = counts > 0
    centers = np.sqrt(edges[:-1] * edges[1:])
    return edges[:-1][keep], edges[1:][keep], centers[keep], density[keep]


def write_distribution_csv(path, entries: list[tuple[int | None, WaitingTimeDistribution, RiskFunction]]) -> None:
    """Write ``k,tau,f,R`` rows (tau rows with zero probability omitted)."""
    with atomic_writer(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "tau", "f", "R"])
        for k, dist, risk in entries:
            label = "" if k is None else k
            for tau, f, r in zip(dist.support, dist.f, risk.values):
                if f > 0:
                    writer.writerow([label, tau, f"{f:.12g}", f"{r:.12g}"])


def write_zeta_csv(path, rows: list[ZetaRow]) -> None:
    with atomic_writer(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "zeta", "zeta_err", "n_k"])
        for row in rows:
            writer.writerow([row.k, f"{row.zeta:.12g}", f"{row.zeta_err:.12g}", row.n_k])


def write_rescaled_csv(path, curves: list[RescaledRiskCurve]) -> None:
    with atomic_writer(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "t_R", "R"])
        for c in curves:
            for t_r, v in zip(c.t_r, c.values):
                if v > 0:
                    writer.writerow([c.k, f"{t_r:.12g}", f"{v:.12g}"])
