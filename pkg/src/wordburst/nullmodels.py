"""Seeded synthetic corpus generators used as reference processes.

Three word-event processes over an integer day grid:

* ``poisson``: every word draws independent Poisson day counts at one
  shared rate; gaps between event-days are then geometric, the daily
  analogue of exponential waiting times.
* ``heterogeneous-poisson``: each word first draws its own characteristic
  time tau_c (log-uniform range or two-point mixture) and then behaves
  like a Poisson word of rate 1/tau_c.  Pooling such words fattens the
  gap tail even though every single word is memoryless.
* ``stretched-renewal``: word event times accumulate i.i.d. gaps from
  the continuous stretched-exponential law (inverse-CDF sampled), then
  land in day bins.

Generation is deterministic given the spec: word i consumes only its
own substreams (events on channel 0, parameters on channel 1), so a
degenerate mixture reproduces the plain Poisson corpus bit for bit.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from . import stretched
from .errors import SpecValidationError
from .matrix import WordDayMatrix
from .seeding import EVENT_CHANNEL, PARAM_CHANNEL, substream

PROCESSES = ("poisson", "heterogeneous-poisson", "stretched-renewal")
RATE_DISTRIBUTIONS = ("log-uniform", "two-point")


@dataclass(frozen=True)
class SyntheticCorpusSpec:
    """Configuration of one synthetic corpus; JSON-round-trippable."""

    process: str
    horizon: int
    n_words: int
    seed: int
    rate: float | None = None                 # poisson: events per day
    rate_distribution: str | None = None      # heterogeneous: tau_c law
    tau_min: float | None = None
    tau_max: float | None = None
    tau_values: tuple[float, float] | None = None
    weights: tuple[float, float] | None = None
    a: float | None = None                    # stretched-renewal scale
    nu: float | None = None                   # stretched-renewal shape

    def validate(self) -> None:
        bad: list[str] = []
        if self.process not in PROCESSES:
            bad.append("process")
        if not isinstance(self.horizon, int) or self.horizon < 2:
            bad.append("horizon")
        if not isinstance(self.n_words, int) or self.n_words < 1:
            bad.append("n_words")
        if not isinstance(self.seed, int):
            bad.append("seed")
        if self.process == "poisson":
            if self.rate is None or not self.rate > 0:
                bad.append("rate")
        elif self.process == "heterogeneous-poisson":
            if self.rate_distribution not in RATE_DISTRIBUTIONS:
                bad.append("rate_distribution")
            elif self.rate_distribution == "log-uniform":
                if self.tau_min is None or self.tau_min <= 0:
                    bad.append("tau_min")
                if self.tau_max is None or (self.tau_min is not None and self.tau_max < self.tau_min):
                    bad.append("tau_max")
            else:
                if (self.tau_values is None or len(self.tau_values) != 2
                        or any(t <= 0 for t in self.tau_values)):
                    bad.append("tau_values")
                if (self.weights is None or len(self.weights) != 2
                        or any(w < 0 for w in self.weights)
                        or not math.isclose(sum(self.weights), 1.0, rel_tol=1e-9)):
                    bad.append("weights")
        elif self.process == "stretched-renewal":
            if self.a is None or not self.a > 0:
                bad.append("a")
            if self.nu is None or not 0 < self.nu <= 2:
                bad.append("nu")
        if bad:
            raise SpecValidationError(f"invalid generator spec, offending fields: {bad}", fields=bad)

    def to_json(self) -> str:
        data = {k: v for k, v in asdict(self).items() if v is not None}
        if "tau_values" in data:
            data["tau_values"] = list(data["tau_values"])
        if "weights" in data:
            data["weights"] = list(data["weights"])
        return json.dumps(data, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SyntheticCorpusSpec":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecValidationError(f"spec is not valid JSON: {exc}", fields=["<document>"]) from exc
        if not isinstance(raw, dict):
            raise SpecValidationError("spec must be a JSON object", fields=["<document>"])
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise SpecValidationError(f"unknown spec fields: {unknown}", fields=unknown)
        if "tau_values" in raw and isinstance(raw["tau_values"], list):
            raw["tau_values"] = tuple(raw["tau_values"])
        if "weights" in raw and isinstance(raw["weights"], list):
            raw["weights"] = tuple(raw["weights"])
        spec = cls(**raw)
        spec.validate()
        return spec


def generate(spec: SyntheticCorpusSpec) -> WordDayMatrix:
    """Build the synthetic word-day matrix described by ``spec``."""
    spec.validate()
    if spec.process == "poisson":
        return generate_poisson(spec)
    if spec.process == "heterogeneous-poisson":
        return generate_heterogeneous(spec)
    return generate_stretched_renewal(spec)


def _word_name(i: int, n_words: int) -> str:
    return f"w{i:0{max(6, len(str(n_words - 1)))}d}"


def _store_counts(matrix: WordDayMatrix, name: str, counts: np.ndarray) -> None:
    days = np.nonzero(counts)[0]
    if days.size:
        matrix.counts[name] = {int(d): int(counts[d]) for d in days}


def generate_poisson(spec: SyntheticCorpusSpec) -> WordDayMatrix:
    """Independent Poisson day counts at the shared rate; empty words vanish."""
    matrix = WordDayMatrix(horizon=spec.horizon)
    for i in range(spec.n_words):
        rng = substream(spec.seed, i, EVENT_CHANNEL)
        counts = rng.poisson(spec.rate, spec.horizon)
        _store_counts(matrix, _word_name(i, spec.n_words), counts)
    return matrix


def draw_tau_c(spec: SyntheticCorpusSpec, rng: np.random.Generator) -> float:
    if spec.rate_distribution == "log-uniform":
        if spec.tau_min == spec.tau_max:
            return float(spec.tau_min)
        return float(np.exp(rng.uniform(np.log(spec.tau_min), np.log(spec.tau_max))))
    values = np.asarray(spec.tau_values, dtype=float)
    if values[0] == values[1]:
        return float(values[0])
    return float(values[rng.choice(2, p=np.asarray(spec.weights, dtype=float))])


def generate_heterogeneous(spec: SyntheticCorpusSpec) -> WordDayMatrix:
    """Per-word characteristic time, then Poisson day counts at 1/tau_c.

    tau_c draws use the parameter channel, so a point-mass tau_c law
    leaves the event streams identical to :func:`generate_poisson` at
    rate 1/tau_c under the same seed.
    """
    matrix = WordDayMatrix(horizon=spec.horizon)
    for i in range(spec.n_words):
        tau_c = draw_tau_c(spec, substream(spec.seed, i, PARAM_CHANNEL))
        rng = substream(spec.seed, i, EVENT_CHANNEL)
        counts = rng.poisson(1.0 / tau_c, spec.horizon)
        _store_counts(matrix, _word_name(i, spec.n_words), counts)
    return matrix


def generate_stretched_renewal(spec: SyntheticCorpusSpec) -> WordDayMatrix:
    """Renewal events with stretched-exponential gaps, floored to days.

    Gaps are inverse-CDF transforms of the word's uniform stream; events
    past the horizon are discarded.  Several events in one day simply
    raise that day's count; downstream gap analysis sees one event-day.
    """
    matrix = WordDayMatrix(horizon=spec.horizon)
    mean_gap = stretched.moment(1, spec.a, spec.nu)
    batch = max(16, int(spec.horizon / mean_gap * 1.25) + 8)
    for i in range(spec.n_words):
        rng = substream(spec.seed, i, EVENT_CHANNEL)
        counts = np.zeros(spec.horizon, dtype=np.int64)
        t = 0.0
        alive = True
        while alive:
            gaps = stretched.sample(rng, batch, spec.a, spec.nu)
            for g in gaps:
                t += g
                if t >= spec.horizon:
                    alive = False
                    break
                counts[int(t)] += 1
        _store_counts(matrix, _word_name(i, spec.n_words), counts)
    return matrix
