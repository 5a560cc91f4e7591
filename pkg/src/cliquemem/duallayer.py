"""Double layered structure: tournament hetero-association plus clique auto-association.

The lower layer chains pattern-to-pattern associations exactly like the single
layered vectorial network; an upper layer of mirror fanals (identity address
mapping) stores each pattern as a clique. After every hetero step the
tentative pattern is cleaned in the clique layer, which strips insertions that
lack clique support, before re-entering the decoding window.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

import numpy as np

from .clique import store_clique
from .core import ClusterLayout, ConnectionMatrix, DecoderSpec, plain_sum_scores
from .vectorial import (
    VectorialDecodeResult,
    _pattern_ids,
    select,
    store_vectorial,
    validate_vectorial,
)

__all__ = [
    "DoubleLayerNetwork",
    "clique_cleanup",
    "decode_double",
    "efficiency_double",
    "efficiency_single",
    "load_double",
    "memory_bits_double",
    "memory_bits_single",
    "save_double",
    "store_double",
]


@dataclass
class DoubleLayerNetwork:
    layout: ClusterLayout
    hetero: ConnectionMatrix
    auto: ConnectionMatrix

    @classmethod
    def create(cls, layout: ClusterLayout) -> "DoubleLayerNetwork":
        return cls(layout=layout,
                   hetero=ConnectionMatrix(layout, directed=True),
                   auto=ConnectionMatrix(layout, directed=False))


def store_double(net: DoubleLayerNetwork, patterns, r: int, restrict: bool = False):
    """Store a vectorial sequence in the hetero layer and each pattern as a clique."""
    seq = validate_vectorial(net.layout, patterns, r=r, restrict=restrict)
    store_vectorial(net.hetero, seq, r=r, restrict=restrict)
    for p in seq:
        store_clique(net.auto, p)


def clique_cleanup(auto: ConnectionMatrix, pattern, alpha: int,
                   iterations: int = 4, gamma: float = 1000.0) -> np.ndarray:
    """Iterative top-alpha clique decoding with a self-excitation memory effect.

    Each round adds gamma to every currently active fanal's score, so with a
    large gamma active fanals only lose to other active fanals; insertions
    without clique support fall out of the top alpha while true clique members
    keep the maximal score.
    """
    ids = np.sort(np.asarray(pattern, dtype=np.int64).ravel())
    for _ in range(iterations):
        if ids.size == 0:
            return ids
        scores = plain_sum_scores(auto, ids).astype(np.int64)
        scores[ids] += int(gamma)
        new = select(scores, DecoderSpec("gwsta", alpha=alpha))
        if new.size == ids.size and np.array_equal(new, ids):
            break
        ids = new
    return ids


def decode_double(net: DoubleLayerNetwork, cue, r: int, alpha: int, length: int,
                  start: int = 0, auto_alpha: int | None = None,
                  iterations: int = 4, gamma: float = 1000.0,
                  restrict: bool = False) -> VectorialDecodeResult:
    """Vectorial decoding with a clique cleanup after every hetero step.

    ``alpha`` drives the hetero layer's top-alpha selection; the auto layer
    defaults to the same alpha. The cleaned pattern is what enters the window
    and the retrieved sequence.
    """
    layout = net.layout
    cue_ids = [_pattern_ids(layout, p) for p in cue]
    if not cue_ids:
        raise ValueError("cue must contain at least one pattern")
    if length <= start + len(cue_ids):
        raise ValueError("nothing to decode: length too small")
    if auto_alpha is None:
        auto_alpha = alpha
    rule = DecoderSpec("gwsta", alpha=alpha)

    window: deque = deque(cue_ids, maxlen=r)
    result = VectorialDecodeResult(
        patterns=[frozenset(int(f) for f in p) for p in cue_ids],
        start=start,
        cue_length=len(cue_ids),
    )
    for t in range(start + len(cue_ids), length):
        act_lists = [p for p in window if p.size]
        if act_lists:
            active = np.concatenate(act_lists)
            scores = plain_sum_scores(net.hetero, active)
            if restrict:
                occupied = np.unique(active // layout.l)
                scores.reshape(layout.chi, layout.l)[occupied] = 0
            tentative = select(scores, rule, phi_size=active.size)
        else:
            tentative = np.empty(0, np.int64)
        cleaned = clique_cleanup(net.auto, tentative, alpha=auto_alpha,
                                 iterations=iterations, gamma=gamma)
        if cleaned.size == 0:
            result.empty_steps.append(t)
        window.append(cleaned)
        result.patterns.append(frozenset(int(f) for f in cleaned))
    return result


# -- memory accounting ---------------------------------------------------------

def memory_bits_single(chi: int, l: int) -> int:
    """Bits available to the single layered structure: all oriented pairs."""
    n = chi * l
    return n * n


def memory_bits_double(chi: int, l: int) -> int:
    """Single-layer bits plus the non-oriented clique layer (about 3n^2/2)."""
    n = chi * l
    return n * n + chi * (chi - 1) * l * l // 2


def efficiency_single(chi: int, l: int, c: int, S: float, L: float) -> float:
    from .analytic import pattern_bits
    return S * L * pattern_bits(chi, l, c) / memory_bits_single(chi, l)


def efficiency_double(chi: int, l: int, c: int, S: float, L: float) -> float:
    from .analytic import pattern_bits
    return S * L * pattern_bits(chi, l, c) / memory_bits_double(chi, l)


# -- snapshots -----------------------------------------------------------------

def save_double(net: DoubleLayerNetwork, path: str):
    """Write both layers next to a one-line manifest binding them."""
    hetero_name = os.path.basename(path) + ".hetero"
    auto_name = os.path.basename(path) + ".auto"
    directory = os.path.dirname(os.path.abspath(path))
    net.hetero.save(os.path.join(directory, hetero_name))
    net.auto.save(os.path.join(directory, auto_name))
    with open(path, "w", encoding="ascii") as f:
        f.write(f"DOUBLE {hetero_name} {auto_name}\n")


def load_double(path: str) -> DoubleLayerNetwork:
    with open(path, encoding="ascii") as f:
        parts = f.readline().split()
    if len(parts) != 3 or parts[0] != "DOUBLE":
        raise OSError(f"{path}: bad double-layer manifest")
    directory = os.path.dirname(os.path.abspath(path))
    hetero = ConnectionMatrix.load(os.path.join(directory, parts[1]))
    auto = ConnectionMatrix.load(os.path.join(directory, parts[2]))
    if hetero.layout != auto.layout:
        raise OSError(f"{path}: layer layouts disagree")
    if not hetero.directed or auto.directed:
        raise OSError(f"{path}: layer orientations disagree with the structure")
    return DoubleLayerNetwork(layout=hetero.layout, hetero=hetero, auto=auto)
