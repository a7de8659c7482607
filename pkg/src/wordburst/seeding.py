"""Deterministic random-stream derivation.

All randomized code derives per-unit generators from one master seed via
``numpy.random.SeedSequence`` spawn keys, so results do not depend on
iteration order or scheduling.  Channel 0 is reserved for event/count
draws, channel 1 for per-word parameter draws; keeping them separate
means a generator that skips a parameter draw consumes the exact same
event stream as one that does not.
"""
from __future__ import annotations

import numpy as np

EVENT_CHANNEL = 0
PARAM_CHANNEL = 1


def substream(seed: int, index: int, channel: int = EVENT_CHANNEL) -> np.random.Generator:
    """Return the generator for unit ``index`` on ``channel`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, channel)))
