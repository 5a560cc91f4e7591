"""Random corpora, distortion injection, and the corpus file formats."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ClusterLayout, InfeasibleConfigError

__all__ = [
    "DistortionSpec",
    "distort_message",
    "load_sequences",
    "load_vectorial",
    "random_messages",
    "random_symbol_sequences",
    "random_vectorial_sequences",
    "save_sequences",
    "save_vectorial",
]


def random_symbol_sequences(rng: np.random.Generator, count: int, length: int,
                            l: int) -> np.ndarray:
    """(count, length) array of iid uniform symbols in [0, l)."""
    return rng.integers(0, l, size=(count, length), dtype=np.int64)


def random_messages(rng: np.random.Generator, count: int, layout: ClusterLayout,
                    c: int) -> list[np.ndarray]:
    """Messages of order c: c distinct clusters, one uniform fanal each."""
    if not 1 <= c <= layout.chi:
        raise InfeasibleConfigError(f"need 1 <= c <= chi, got c={c}, chi={layout.chi}")
    out = []
    for _ in range(count):
        if c == layout.chi:
            clusters = np.arange(layout.chi, dtype=np.int64)
        else:
            clusters = np.sort(rng.choice(layout.chi, size=c, replace=False))
        fanals = rng.integers(0, layout.l, size=c, dtype=np.int64)
        out.append(clusters * layout.l + fanals)
    return out


def random_vectorial_sequences(rng: np.random.Generator, count: int, length: int,
                               layout: ClusterLayout, order: int,
                               order_max: int | None = None, r: int = 0,
                               restrict: bool = False) -> list[list[np.ndarray]]:
    """Sequences of sparse patterns with fixed or uniformly variable order.

    Under ``restrict`` each pattern's clusters are drawn outside the clusters
    of the r previous patterns, which keeps generated corpora storable.
    """
    c_max = order if order_max is None else order_max
    if not 1 <= order <= c_max <= layout.chi:
        raise InfeasibleConfigError("need 1 <= order <= order_max <= chi")
    if restrict and (r + 1) * c_max > layout.chi:
        raise InfeasibleConfigError(
            f"restricted corpus impossible: (r+1)*c = {(r + 1) * c_max} clusters "
            f"needed, only {layout.chi} available"
        )
    sequences = []
    for _ in range(count):
        patterns: list[np.ndarray] = []
        recent: list[np.ndarray] = []
        for _t in range(length):
            c_t = order if order_max is None else int(rng.integers(order, c_max + 1))
            if restrict and recent:
                forbidden = np.unique(np.concatenate(recent))
                allowed = np.setdiff1d(np.arange(layout.chi), forbidden)
            else:
                allowed = np.arange(layout.chi)
            clusters = np.sort(rng.choice(allowed, size=c_t, replace=False))
            fanals = rng.integers(0, layout.l, size=c_t, dtype=np.int64)
            patterns.append(clusters * layout.l + fanals)
            if restrict:
                recent.append(clusters)
                if len(recent) > r:
                    recent.pop(0)
        sequences.append(patterns)
    return sequences


@dataclass(frozen=True)
class DistortionSpec:
    """Erasure/error fractions over a message's clusters plus spurious insertions."""

    erasure: float = 0.0
    error: float = 0.0
    insertions: int = 0

    def __post_init__(self):
        if not 0.0 <= self.erasure <= 1.0 or not 0.0 <= self.error <= 1.0:
            raise ValueError("fractions must be in [0, 1]")
        if self.insertions < 0:
            raise ValueError("insertions must be >= 0")


def distort_message(rng: np.random.Generator, message, spec: DistortionSpec,
                    layout: ClusterLayout) -> np.ndarray:
    """Distorted input activation for a stored message.

    Erasures silence whole clusters, errors substitute a uniformly chosen
    wrong fanal in the same cluster, insertions light one random fanal in
    clusters the message leaves silent.
    """
    ids = np.asarray(message, dtype=np.int64).copy()
    c = ids.size
    n_erase = int(round(spec.erasure * c))
    if n_erase:
        keep = np.ones(c, bool)
        keep[rng.choice(c, size=n_erase, replace=False)] = False
        ids = ids[keep]
    n_err = min(int(round(spec.error * c)), ids.size)
    if n_err:
        which = rng.choice(ids.size, size=n_err, replace=False)
        for k in which:
            cluster = ids[k] // layout.l
            wrong = int(rng.integers(0, layout.l - 1))
            if wrong >= ids[k] % layout.l:
                wrong += 1
            ids[k] = cluster * layout.l + wrong
    if spec.insertions:
        used = set((np.asarray(message) // layout.l).tolist())
        silent = np.array([cl for cl in range(layout.chi) if cl not in used])
        take = min(spec.insertions, silent.size)
        clusters = rng.choice(silent, size=take, replace=False)
        fanals = rng.integers(0, layout.l, size=take)
        ids = np.concatenate([ids, clusters * layout.l + fanals])
    return np.sort(ids)


# -- corpus files ---------------------------------------------------------------
# Symbol sequences: one sequence per line, whitespace-separated 1-based indices.
# Vectorial sequences: one pattern per line as "t: (i,j) (i,j) ...", 1-based,
# blank line between sequences.

def save_sequences(path, sequences: np.ndarray):
    seqs = np.asarray(sequences, dtype=np.int64)
    with open(path, "w", encoding="ascii") as f:
        for row in seqs:
            f.write(" ".join(str(int(s) + 1) for s in row) + "\n")


def load_sequences(path, l: int | None = None) -> np.ndarray:
    rows = []
    with open(path, encoding="ascii") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                row = [int(tok) - 1 for tok in line.split()]
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: bad symbol") from exc
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: empty corpus")
    lengths = {len(row) for row in rows}
    if len(lengths) != 1:
        raise ValueError(f"{path}: sequences have mixed lengths {sorted(lengths)}")
    arr = np.array(rows, dtype=np.int64)
    if arr.min() < 0 or (l is not None and arr.max() >= l):
        raise ValueError(f"{path}: symbol out of range")
    return arr


def save_vectorial(path, sequences: list[list[np.ndarray]], layout: ClusterLayout):
    with open(path, "w", encoding="ascii") as f:
        for s, patterns in enumerate(sequences):
            if s:
                f.write("\n")
            for t, pattern in enumerate(patterns, 1):
                pairs = " ".join(
                    f"({int(p) // layout.l + 1},{int(p) % layout.l + 1})" for p in pattern
                )
                f.write(f"{t}: {pairs}\n")


def load_vectorial(path, layout: ClusterLayout) -> list[list[np.ndarray]]:
    sequences: list[list[np.ndarray]] = []
    current: list[np.ndarray] = []
    with open(path, encoding="ascii") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                if current:
                    sequences.append(current)
                    current = []
                continue
            try:
                head, _, rest = line.partition(":")
                t = int(head)
                ids = []
                for tok in rest.split():
                    i, j = tok.strip("()").split(",")
                    ids.append(layout.fanal(int(i) - 1, int(j) - 1))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{line_no}: bad pattern line") from exc
            if t != len(current) + 1:
                raise ValueError(f"{path}:{line_no}: pattern index {t} out of order")
            current.append(np.array(sorted(ids), dtype=np.int64))
    if current:
        sequences.append(current)
    if not sequences:
        raise ValueError(f"{path}: empty corpus")
    return sequences
