"""Looped chains of tournaments: storing and replaying arbitrarily long symbol sequences.

Position t of a sequence (0-based) lives in cluster t mod chi, so a cluster is
reused every chi positions and sequences may be far longer than the network.
Each position feeds its r downstream clusters with directed connections;
decoding walks the sequence one position at a time with a local
winner-take-all driven by the r most recent estimates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConnectionMatrix, InfeasibleConfigError

__all__ = [
    "DecodedSequence",
    "decode_sequence",
    "schedule_density",
    "sber",
    "sequence_exact",
    "sqer",
    "store_sequence",
    "store_sequences",
]


def _sequence_ids(matrix: ConnectionMatrix, symbols) -> np.ndarray:
    layout = matrix.layout
    sym = np.asarray(symbols, dtype=np.int64)
    if sym.ndim != 1 or sym.size == 0:
        raise ValueError("a sequence is a non-empty 1-D list of symbols")
    if sym.min() < 0 or sym.max() >= layout.l:
        raise ValueError(f"symbols must be in [0, {layout.l})")
    pos = np.arange(sym.size, dtype=np.int64)
    return (pos % layout.chi) * layout.l + sym


def _pair_arrays(ids: np.ndarray, r: int, chi: int, wrap: bool):
    L = ids.shape[-1]
    srcs, dsts = [], []
    for d in range(1, r + 1):
        if d < L:
            srcs.append(ids[..., :L - d].ravel())
            dsts.append(ids[..., d:].ravel())
        if wrap and d >= 1:
            srcs.append(ids[..., L - d:].ravel())
            dsts.append(ids[..., :d].ravel())
    return np.concatenate(srcs), np.concatenate(dsts)


def store_sequence(matrix: ConnectionMatrix, symbols, r: int, wrap: bool = False):
    """Store one symbol sequence with anticipation degree r.

    Every position t connects to positions t+1 .. t+r. With ``wrap`` the
    pairing closes over the sequence end (t+d taken mod L), which needs chi to
    divide L so the wrapped partner still lands in the downstream cluster;
    this reproduces the idealized density statistics exactly. Without wrap the
    pairing simply stops at the last position.
    """
    if not matrix.directed:
        raise ValueError("sequence storage needs a directed matrix")
    chi = matrix.layout.chi
    if not 1 <= r <= chi - 1:
        raise InfeasibleConfigError(f"need 1 <= r <= chi-1, got r={r}, chi={chi}")
    ids = _sequence_ids(matrix, symbols)
    if wrap and ids.size % chi:
        raise InfeasibleConfigError("wrapped pairing needs chi to divide L")
    src, dst = _pair_arrays(ids, r, chi, wrap)
    matrix.add_pairs(src, dst)


def store_sequences(matrix: ConnectionMatrix, sequences: np.ndarray, r: int,
                    wrap: bool = False, chunk: int = 256):
    """Batch store of an (S, L) array of symbol sequences (one matrix pass per chunk)."""
    if not matrix.directed:
        raise ValueError("sequence storage needs a directed matrix")
    chi = matrix.layout.chi
    if not 1 <= r <= chi - 1:
        raise InfeasibleConfigError(f"need 1 <= r <= chi-1, got r={r}, chi={chi}")
    seqs = np.asarray(sequences, dtype=np.int64)
    if seqs.ndim != 2:
        raise ValueError("expected an (S, L) array")
    if seqs.size == 0:
        return
    if seqs.min() < 0 or seqs.max() >= matrix.layout.l:
        raise ValueError(f"symbols must be in [0, {matrix.layout.l})")
    L = seqs.shape[1]
    if wrap and L % chi:
        raise InfeasibleConfigError("wrapped pairing needs chi to divide L")
    base = (np.arange(L, dtype=np.int64) % chi) * matrix.layout.l
    for k in range(0, seqs.shape[0], chunk):
        ids = base + seqs[k:k + chunk]
        src, dst = _pair_arrays(ids, r, chi, wrap)
        matrix.add_pairs(src, dst)


@dataclass
class DecodedSequence:
    """Symbols over positions start .. length-1, cue echoed, with ambiguity flags."""

    symbols: np.ndarray
    ambiguous: np.ndarray
    start: int
    cue_length: int

    def decoded_slice(self) -> slice:
        return slice(self.cue_length, None)


def decode_sequence(matrix: ConnectionMatrix, cue, r: int, length: int,
                    start: int = 0, mode: str = "plain_sum") -> DecodedSequence:
    """Sequentially complete a sequence from consecutive cue symbols.

    The cue occupies positions start .. start+len(cue)-1; its starting
    position must be known. Each later position is scored in its own cluster
    from the fanals active at the r upstream positions, then a local
    winner-take-all fires every fanal at the cluster maximum. Ties leave
    several fanals active and flag the step ambiguous; the reported symbol is
    then the smallest winning index.

    ``mode`` controls how several tied fanals at one upstream position
    contribute: ``plain_sum`` adds every contribution (this reproduces the
    reported error propagation) while ``sum_of_max`` caps each upstream
    position at 1.
    """
    layout = matrix.layout
    chi, l = layout.chi, layout.l
    w = matrix.w
    cue = np.asarray(cue, dtype=np.int64)
    if cue.ndim != 1 or cue.size == 0:
        raise ValueError("cue must be a non-empty 1-D list of symbols")
    if cue.min() < 0 or cue.max() >= l:
        raise ValueError(f"cue symbols must be in [0, {l})")
    if not 1 <= r <= chi - 1:
        raise InfeasibleConfigError(f"need 1 <= r <= chi-1, got r={r}, chi={chi}")
    if length <= start + cue.size:
        raise ValueError("nothing to decode: length too small")
    if mode not in ("plain_sum", "sum_of_max"):
        raise ValueError(f"unknown mode {mode!r}")
    cap_ties = mode == "sum_of_max"

    total = length - start
    symbols = np.empty(total, np.int64)
    ambiguous = np.zeros(total, bool)
    symbols[:cue.size] = cue

    # active[t] holds the flat ids estimated at position start + t
    active: list[np.ndarray] = [
        np.array([((start + t) % chi) * l + cue[t]], np.int64) for t in range(cue.size)
    ]
    for t in range(cue.size, total):
        cluster = (start + t) % chi
        base = cluster * l
        scores = np.zeros(l, np.int32)
        for d in range(1, min(r, t) + 1):
            src = active[t - d]
            if src.size == 1:
                scores += w[src[0], base:base + l]
            elif cap_ties:
                scores += w[src][:, base:base + l].max(axis=0)
            else:
                scores += w[src][:, base:base + l].sum(axis=0, dtype=np.int32)
        winners = np.flatnonzero(scores == scores.max())
        active.append(base + winners.astype(np.int64))
        symbols[t] = winners[0]
        ambiguous[t] = winners.size != 1
    return DecodedSequence(symbols=symbols, ambiguous=ambiguous,
                           start=start, cue_length=int(cue.size))


def sber(reference, decoded: DecodedSequence) -> float:
    """Fraction of decoded positions not retrieved exactly.

    Ambiguous positions count as errors: the step only succeeds when the
    active set is exactly the stored singleton.
    """
    ref = np.asarray(reference, dtype=np.int64)
    sl = decoded.decoded_slice()
    want = ref[decoded.start + decoded.cue_length:decoded.start + decoded.symbols.size]
    got = decoded.symbols[sl]
    if got.size == 0:
        raise ValueError("no decoded positions")
    errors = np.count_nonzero((got != want) | decoded.ambiguous[sl])
    return errors / got.size


def sequence_exact(reference, decoded: DecodedSequence) -> bool:
    """True when every decoded position is unambiguous and correct."""
    return sber(reference, decoded) == 0.0


def sqer(failures) -> float:
    """Fraction of failed trials; a trial fails on its first wrong symbol."""
    flags = list(failures)
    if not flags:
        raise ValueError("no trials")
    return sum(bool(f) for f in flags) / len(flags)


def schedule_density(matrix: ConnectionMatrix, r: int) -> float:
    """Set bits over the r*chi*l^2 bits addressable by the chain schedule."""
    layout = matrix.layout
    eligible = r * layout.chi * layout.l * layout.l
    return int(np.count_nonzero(matrix.w)) / eligible
