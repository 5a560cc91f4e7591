"""Fixed-length message storage as cliques or ring graphs, with iterative retrieval."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .core import (
    ConnectionMatrix,
    DecoderSpec,
    as_fanal_ids,
    plain_sum_scores,
    sum_of_max_scores,
)
from .vectorial import select

__all__ = [
    "decode_fixed",
    "glsko_prune",
    "store_clique",
    "store_ring",
]


def _message_ids(matrix: ConnectionMatrix, message) -> np.ndarray:
    ids = as_fanal_ids(matrix.layout, message)
    clusters = ids // matrix.layout.l
    if len(set(clusters.tolist())) != ids.size:
        raise ValueError("message must address distinct clusters")
    return ids


def store_clique(matrix: ConnectionMatrix, message):
    """Store a message as a clique: every unordered pair of its fanals connected."""
    if matrix.directed:
        raise ValueError("clique storage needs an undirected matrix")
    ids = _message_ids(matrix, message)
    if ids.size < 2:
        return
    pairs = np.array(list(combinations(ids.tolist(), 2)), dtype=np.int64)
    matrix.add_pairs(pairs[:, 0], pairs[:, 1])


def store_ring(matrix: ConnectionMatrix, message, r: int):
    """Store a message as a 2r-connected ring over its fanals.

    Ring positions follow ascending cluster index; position k connects to
    positions k +- 1 .. k +- r (mod c), i.e. r*c edges for r < c/2 and the
    full clique again at r = c - 1.
    """
    if matrix.directed:
        raise ValueError("ring storage needs an undirected matrix")
    ids = _message_ids(matrix, message)
    c = ids.size
    if c < 2:
        return
    if not 1 <= r <= c - 1:
        raise ValueError(f"need 1 <= r <= c-1, got r={r} for order {c}")
    order = ids[np.argsort(ids // matrix.layout.l)]
    pairs = set()
    for k in range(c):
        for off in range(1, r + 1):
            a, b = int(order[k]), int(order[(k + off) % c])
            if a != b:
                pairs.add((min(a, b), max(a, b)))
    arr = np.array(sorted(pairs), dtype=np.int64)
    matrix.add_pairs(arr[:, 0], arr[:, 1])


def glsko_prune(scores: np.ndarray, active: np.ndarray) -> np.ndarray:
    """One losers-kicked-out step: drop the lowest-scoring tier of the active set.

    Returns ``active`` unchanged when all active scores are equal.
    """
    s = scores[active]
    if s.size == 0 or s.min() == s.max():
        return active
    return active[s > s.min()]


def decode_fixed(matrix: ConnectionMatrix, active, spec: DecoderSpec,
                 clusters=None, mode: str = "sum_of_max") -> frozenset:
    """Iteratively retrieve a fixed-length message from a distorted input.

    ``active`` is the input activation (flat ids or (cluster, index) pairs).
    With rule ``wta`` a local winner-take-all runs in ``clusters`` (the known
    message clusters for guided decoding; all clusters when omitted). Ties
    keep every fanal at the cluster maximum active. The global rules operate
    on the whole network; ``glsko`` eliminates the weakest active tier each
    iteration instead of selecting winners.
    """
    layout = matrix.layout
    l = layout.l
    ids = as_fanal_ids(layout, active)

    if spec.rule == "wta":
        targets = list(clusters) if clusters is not None else range(layout.chi)
        for _ in range(spec.iterations):
            scores = sum_of_max_scores(matrix, ids)
            winners = []
            for c in targets:
                seg = scores[c * l:(c + 1) * l]
                winners.append(c * l + np.flatnonzero(seg == seg.max()))
            ids = np.concatenate(winners) if winners else ids
        return frozenset(int(f) for f in ids)

    if spec.rule == "glsko":
        for _ in range(spec.iterations):
            scores = sum_of_max_scores(matrix, ids) if mode == "sum_of_max" \
                else plain_sum_scores(matrix, ids)
            if spec.gamma:
                scores = scores.astype(np.int64)
                scores[ids] += int(spec.gamma)
            pruned = glsko_prune(scores, ids)
            if pruned.size == ids.size:
                break
            ids = pruned
        return frozenset(int(f) for f in ids)

    # global selection rules: ts / gwta / gwsta
    for _ in range(spec.iterations):
        scores = sum_of_max_scores(matrix, ids) if mode == "sum_of_max" \
            else plain_sum_scores(matrix, ids)
        if spec.gamma:
            scores = scores.astype(np.int64)
            scores[ids] += int(spec.gamma)
        ids = select(scores, spec, phi_size=ids.size)
    return frozenset(int(f) for f in ids)
