"""Vectorial sequences: chained bipartite storage and global selection decoding.

A vectorial sequence is a list of sparse patterns, each a set of fanals with
at most one per cluster. Linked patterns are associated through a directed
complete bipartite graph; decoding activates a window of the r most recent
pattern estimates, passes plain-sum messages, and applies a global selection
rule (threshold, global winner, or top-alpha winners).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import ClusterLayout, ConnectionMatrix, DecoderSpec, as_fanal_ids, plain_sum_scores

__all__ = [
    "VectorialDecodeResult",
    "decode_vectorial",
    "pattern_error_rate",
    "select",
    "store_vectorial",
    "validate_vectorial",
]


def _pattern_ids(layout: ClusterLayout, pattern) -> np.ndarray:
    ids = np.sort(as_fanal_ids(layout, pattern))
    clusters = ids // layout.l
    if np.unique(clusters).size != ids.size:
        raise ValueError("pattern has more than one fanal in a cluster")
    return ids


def validate_vectorial(layout: ClusterLayout, patterns, r: int = 0,
                       restrict: bool = False) -> list[np.ndarray]:
    """Normalize a sequence of patterns; enforce the activity restriction if asked.

    Under restriction the clusters of pattern t must be disjoint from those of
    patterns t+1 .. t+r; the first offending (t, t+delta, cluster) is reported.
    """
    seq = [_pattern_ids(layout, p) for p in patterns]
    if restrict:
        for t in range(len(seq)):
            tc = set((seq[t] // layout.l).tolist())
            for d in range(1, r + 1):
                if t + d >= len(seq):
                    break
                shared = tc & set((seq[t + d] // layout.l).tolist())
                if shared:
                    raise ValueError(
                        f"activity restriction violated: cluster {min(shared)} "
                        f"appears in patterns {t} and {t + d}"
                    )
    return seq


def store_vectorial(matrix: ConnectionMatrix, patterns, r: int, restrict: bool = False):
    """Connect every fanal of pattern t to every fanal of patterns t+1 .. t+r.

    Shared fanals between linked patterns would be self-pairs; those are
    skipped (the diagonal is never written).
    """
    if not matrix.directed:
        raise ValueError("vectorial storage needs a directed matrix")
    if r < 1:
        raise ValueError("r must be >= 1")
    seq = validate_vectorial(matrix.layout, patterns, r=r, restrict=restrict)
    srcs, dsts = [], []
    for t in range(len(seq)):
        for d in range(1, r + 1):
            if t + d >= len(seq):
                break
            a, b = np.meshgrid(seq[t], seq[t + d], indexing="ij")
            srcs.append(a.ravel())
            dsts.append(b.ravel())
    if not srcs:
        return
    src = np.concatenate(srcs)
    dst = np.concatenate(dsts)
    keep = src != dst
    matrix.add_pairs(src[keep], dst[keep])


def select(scores: np.ndarray, spec: DecoderSpec, phi_size: int | None = None,
           default_alpha: int | None = None) -> np.ndarray:
    """Apply a global selection rule to a score vector; returns sorted fanal ids.

    ts     keeps scores >= theta (theta defaults to the window size phi_size);
    gwta   keeps the global maxima;
    gwsta  keeps the top alpha plus every fanal tied with the alpha-th.
    Zero scores never get selected; the result may be empty.
    """
    if spec.rule == "ts":
        theta = spec.theta if spec.theta is not None else phi_size
        if theta is None or theta < 1:
            raise ValueError("ts needs theta >= 1 (or a window to default from)")
        return np.flatnonzero(scores >= theta)
    if spec.rule == "gwta":
        m = scores.max() if scores.size else 0
        if m <= 0:
            return np.empty(0, np.int64)
        return np.flatnonzero(scores == m)
    if spec.rule == "gwsta":
        alpha = spec.alpha if spec.alpha is not None else default_alpha
        if alpha is None or alpha < 1:
            raise ValueError("gwsta needs alpha >= 1 (or a cue to default from)")
        pos = np.flatnonzero(scores > 0)
        if pos.size <= alpha:
            return pos
        vals = scores[pos]
        pivot = np.partition(vals, pos.size - alpha)[pos.size - alpha]
        return pos[vals >= pivot]
    raise ValueError(f"rule {spec.rule!r} is not a global selection rule")


@dataclass
class VectorialDecodeResult:
    """Retrieved patterns (cue echoed first) with per-step diagnostics."""

    patterns: list[frozenset]
    start: int
    cue_length: int
    empty_steps: list[int] = field(default_factory=list)

    def decoded(self) -> list[frozenset]:
        return self.patterns[self.cue_length:]


def decode_vectorial(matrix: ConnectionMatrix, cue, r: int, rule: DecoderSpec,
                     length: int, start: int = 0,
                     restrict: bool = False) -> VectorialDecodeResult:
    """Complete a vectorial sequence from r consecutive cue patterns.

    Each step activates the window, runs one plain-sum pass, selects with
    ``rule`` and slides the window. Under ``restrict`` the fanals of clusters
    occupied by the window are excluded before selection. An empty selection
    is flagged and decoding continues with an empty pattern.
    """
    layout = matrix.layout
    cue_ids = [_pattern_ids(layout, p) for p in cue]
    if not cue_ids:
        raise ValueError("cue must contain at least one pattern")
    if length <= start + len(cue_ids):
        raise ValueError("nothing to decode: length too small")
    default_alpha = min((p.size for p in cue_ids if p.size), default=None)

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
            scores = plain_sum_scores(matrix, active)
            if restrict:
                occupied = np.unique(active // layout.l)
                scores.reshape(layout.chi, layout.l)[occupied] = 0
            ids = select(scores, rule, phi_size=active.size, default_alpha=default_alpha)
        else:
            ids = np.empty(0, np.int64)
        if ids.size == 0:
            result.empty_steps.append(t)
        window.append(ids)
        result.patterns.append(frozenset(int(f) for f in ids))
    return result


def pattern_error_rate(reference, result: VectorialDecodeResult) -> float:
    """Fraction of decoded positions whose retrieved set differs from the stored one."""
    decoded = result.decoded()
    offset = result.start + result.cue_length
    if not decoded:
        raise ValueError("no decoded positions")
    wrong = 0
    for k, got in enumerate(decoded):
        want = frozenset(int(f) for f in np.asarray(reference[offset + k]).ravel())
        wrong += got != want
    return wrong / len(decoded)
