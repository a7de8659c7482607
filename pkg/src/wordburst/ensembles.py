"""Frequency classes: words grouped by their total occurrence count.

Words with the same total count k over the horizon are treated as
statistically equivalent; the classes partition the vocabulary.  Classes
with k below the horizon belong to the sparse regime where waiting-time
statistics apply, large-k classes to the dense regime where daily-count
statistics apply.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

from .fileio import atomic_writer
from .matrix import WordDayMatrix


@dataclass(frozen=True)
class Ensemble:
    """All words occurring exactly ``k`` times over the horizon."""

    k: int
    words: tuple[str, ...]

    @property
    def n_k(self) -> int:
        return len(self.words)


@dataclass
class EnsembleIndex:
    by_k: dict[int, Ensemble]
    horizon: int

    def __getitem__(self, k: int) -> Ensemble:
        return self.by_k[k]

    def __contains__(self, k: int) -> bool:
        return k in self.by_k

    def ks(self) -> list[int]:
        return sorted(self.by_k)

    @property
    def vocabulary_size(self) -> int:
        return sum(e.n_k for e in self.by_k.values())


def build_ensembles(matrix: WordDayMatrix) -> EnsembleIndex:
    """Partition the vocabulary by exact total count."""
    groups: dict[int, list[str]] = {}
    for word, days in matrix.counts.items():
        groups.setdefault(sum(days.values()), []).append(word)
    by_k = {k: Ensemble(k=k, words=tuple(sorted(ws))) for k, ws in groups.items()}
    return EnsembleIndex(by_k=by_k, horizon=matrix.horizon)


def select_dilute(index: EnsembleIndex) -> list[Ensemble]:
    """Classes averaging less than one occurrence per day (k < horizon)."""
    return [index.by_k[k] for k in index.ks() if k < index.horizon]


def select_dense(index: EnsembleIndex, k_lo: int, k_hi: int) -> list[Ensemble]:
    """Classes with k in the inclusive range [k_lo, k_hi]."""
    if k_lo > k_hi:
        raise ValueError(f"empty range: k_lo {k_lo} > k_hi {k_hi}")
    return [index.by_k[k] for k in index.ks() if k_lo <= k <= k_hi]


def write_spectrum_csv(index: EnsembleIndex, path) -> None:
    """Dump the class-size spectrum as ``k,n_k`` rows."""
    with atomic_writer(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "n_k"])
        for k in index.ks():
            writer.writerow([k, index.by_k[k].n_k])
