"""The word-by-day count matrix, the central corpus summary.

Sparse layout: ``counts[word][day] = number of posts containing word on
that day``.  Stored counts are always >= 1; a word absent on a day simply
has no entry.  Analysis code treats a built matrix as immutable.

Serialized form (UTF-8, one word per line, words sorted)::

    #T=<horizon>
    word<TAB>day:count,day:count,...

with days ascending within a line.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import CorpusFormatError
from .fileio import atomic_writer


@dataclass
class WordDayMatrix:
    horizon: int
    counts: dict[str, dict[int, int]] = field(default_factory=dict)

    def words(self):
        return self.counts.keys()

    @property
    def vocabulary_size(self) -> int:
        return len(self.counts)

    def total(self, word: str) -> int:
        """Total occurrences of ``word`` over the whole horizon."""
        return sum(self.counts[word].values())

    def totals(self) -> dict[str, int]:
        return {w: sum(d.values()) for w, d in self.counts.items()}

    def series(self, word: str) -> Mapping[int, int]:
        return self.counts[word]

    def event_days(self, word: str) -> np.ndarray:
        """Sorted day indices on which ``word`` occurs at least once."""
        return np.array(sorted(self.counts[word]), dtype=np.int64)

    def daily_counts(self, word: str) -> np.ndarray:
        """Dense length-``horizon`` count vector for ``word`` (zeros included)."""
        out = np.zeros(self.horizon, dtype=np.int64)
        for day, c in self.counts[word].items():
            out[day] = c
        return out

    def add(self, word: str, day: int, count: int = 1) -> None:
        if not 0 <= day < self.horizon:
            raise ValueError(f"day {day} outside horizon [0, {self.horizon})")
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        days = self.counts.setdefault(word, {})
        days[day] = days.get(day, 0) + count

    def validate(self) -> None:
        """Check the structural invariants; raises ValueError on violation."""
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        for word, days in self.counts.items():
            if not days:
                raise ValueError(f"word {word!r} has no day entries")
            for day, c in days.items():
                if not 0 <= day < self.horizon:
                    raise ValueError(f"word {word!r}: day {day} outside horizon")
                if c < 1:
                    raise ValueError(f"word {word!r}: count {c} < 1 on day {day}")


def merge_matrices(matrices: Iterable[WordDayMatrix]) -> WordDayMatrix:
    """Union of matrices over the same horizon with disjoint vocabularies."""
    matrices = list(matrices)
    if not matrices:
        raise ValueError("nothing to merge")
    horizon = matrices[0].horizon
    merged: dict[str, dict[int, int]] = {}
    for m in matrices:
        if m.horizon != horizon:
            raise ValueError(f"horizon mismatch: {m.horizon} != {horizon}")
        overlap = merged.keys() & m.counts.keys()
        if overlap:
            raise ValueError(f"vocabulary overlap on merge: {sorted(overlap)[:5]}")
        for w, days in m.counts.items():
            merged[w] = dict(days)
    return WordDayMatrix(horizon=horizon, counts=merged)


def save_matrix(matrix: WordDayMatrix, path) -> None:
    """Write the matrix in its line-delimited form (atomic, deterministic)."""
    with atomic_writer(path) as fh:
        fh.write(f"#T={matrix.horizon}\n")
        for word in sorted(matrix.counts):
            cells = ",".join(f"{d}:{c}" for d, c in sorted(matrix.counts[word].items()))
            fh.write(f"{word}\t{cells}\n")


def load_matrix(path) -> WordDayMatrix:
    """Read a matrix written by :func:`save_matrix`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith("#T="):
            raise CorpusFormatError(f"{path}: missing #T= header line")
        try:
            horizon = int(header[3:])
        except ValueError:
            raise CorpusFormatError(f"{path}: bad horizon in header {header!r}") from None
        matrix = WordDayMatrix(horizon=horizon)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, cells = line.split("\t")
            except ValueError:
                raise CorpusFormatError(f"{path}:{lineno}: expected word<TAB>cells") from None
            days: dict[int, int] = {}
            prev_day = -1
            for cell in cells.split(","):
                try:
                    day_s, count_s = cell.split(":")
                    day, count = int(day_s), int(count_s)
                except ValueError:
                    raise CorpusFormatError(f"{path}:{lineno}: bad cell {cell!r}") from None
                if day <= prev_day:
                    raise CorpusFormatError(f"{path}:{lineno}: days not ascending")
                if not 0 <= day < horizon:
                    raise CorpusFormatError(f"{path}:{lineno}: day {day} outside horizon")
                if count < 1:
                    raise CorpusFormatError(f"{path}:{lineno}: count {count} < 1")
                days[day] = count
                prev_day = day
            if not days:
                raise CorpusFormatError(f"{path}:{lineno}: word with no cells")
            if word in matrix.counts:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate word {word!r}")
            matrix.counts[word] = days
    return matrix
