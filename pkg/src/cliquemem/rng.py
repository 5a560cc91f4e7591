"""Seedable, splittable random streams for reproducible experiments.

Every consumer derives its own generator from (seed, *key), so adding trials
or sweep points never perturbs the streams of existing ones.
"""
from __future__ import annotations

import numpy as np

__all__ = ["substream"]

# key namespaces used by the experiment runner
CORPUS_STREAM = 0
TRIAL_STREAM = 1


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the given seed and key path."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))
