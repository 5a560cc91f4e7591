"""Network geometry, binary connection storage, and shared message-passing kernels.

Fanals (binary nodes) are addressed either as ``(cluster, index)`` pairs or as
flat ids ``cluster * l + index``. Everything internal is 0-based; conversion to
the 1-based convention happens only at the CLI and file-format boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ActivationState",
    "ClusterLayout",
    "ConnectionMatrix",
    "DecoderSpec",
    "InfeasibleConfigError",
    "as_fanal_ids",
    "delta",
    "message_passing",
    "plain_sum_scores",
    "sum_of_max_scores",
]

DECODER_RULES = ("wta", "ts", "gwta", "gwsta", "glsko")


class InfeasibleConfigError(ValueError):
    """A requested configuration cannot be built or simulated."""


@dataclass(frozen=True)
class ClusterLayout:
    """``chi`` clusters of ``l`` fanals each; ``n = chi * l`` fanals total."""

    chi: int
    l: int

    def __post_init__(self):
        if self.chi < 1:
            raise ValueError(f"chi must be >= 1, got {self.chi}")
        if self.l < 1:
            raise ValueError(f"l must be >= 1, got {self.l}")

    @property
    def n(self) -> int:
        return self.chi * self.l

    def fanal(self, cluster: int, index: int) -> int:
        """Flat id of fanal ``index`` in ``cluster``."""
        if not 0 <= cluster < self.chi:
            raise IndexError(f"cluster {cluster} out of range [0, {self.chi})")
        if not 0 <= index < self.l:
            raise IndexError(f"fanal index {index} out of range [0, {self.l})")
        return cluster * self.l + index

    def cluster_of(self, fanal: int) -> int:
        return int(fanal) // self.l

    def index_of(self, fanal: int) -> int:
        return int(fanal) % self.l

    def cluster_slice(self, cluster: int) -> slice:
        return slice(cluster * self.l, (cluster + 1) * self.l)


def delta(i: int, i_prime: int, chi: int) -> int:
    """Forward offset from cluster ``i`` to ``i_prime`` on the cluster ring.

    ``i_prime`` is a downstream neighbor of ``i`` iff ``1 <= delta <= r``.
    """
    if not 0 <= i < chi or not 0 <= i_prime < chi:
        raise IndexError(f"cluster index out of range [0, {chi})")
    return (i_prime - i) % chi


def as_fanal_ids(layout: ClusterLayout, message) -> np.ndarray:
    """Normalize a message to a flat-id array.

    Accepts an iterable of flat ids or of ``(cluster, index)`` pairs.
    """
    arr = np.asarray(list(message), dtype=np.int64)
    if arr.ndim == 2:
        if arr.shape[1] != 2:
            raise ValueError("pairs must be (cluster, index)")
        return np.array([layout.fanal(int(c), int(j)) for c, j in arr], dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("expected flat ids or (cluster, index) pairs")
    if arr.size and (arr.min() < 0 or arr.max() >= layout.n):
        raise IndexError("fanal id out of range")
    return arr


class ConnectionMatrix:
    """Binary n x n connection matrix over a cluster layout.

    Stored dense as ``uint8`` so storage is a fancy-index assignment and the
    decode inner loops are plain row reductions. The snapshot file format is
    bit-packed (MSB first), see :meth:`save`.
    """

    def __init__(self, layout: ClusterLayout, directed: bool):
        self.layout = layout
        self.directed = bool(directed)
        self.w = np.zeros((layout.n, layout.n), dtype=np.uint8)

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return (
            f"ConnectionMatrix(chi={self.layout.chi}, l={self.layout.l}, "
            f"{kind}, connections={self.count_connections()})"
        )

    def _check_ids(self, ids: np.ndarray):
        if ids.size and (ids.min() < 0 or ids.max() >= self.layout.n):
            raise IndexError("fanal id out of range")

    def add(self, src: int, dst: int):
        """Set one connection bit; a second call is a no-op.

        Self-connections are never stored by any rule and are rejected here.
        """
        self.add_pairs(np.array([src]), np.array([dst]))

    def add_pairs(self, src, dst):
        """Set connection bits for parallel arrays of source/target ids."""
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        self._check_ids(src)
        self._check_ids(dst)
        if np.any(src == dst):
            raise ValueError("self-connections are not storable")
        self.w[src, dst] = 1
        if not self.directed:
            self.w[dst, src] = 1

    def connected(self, src: int, dst: int) -> bool:
        return bool(self.w[src, dst])

    def count_connections(self) -> int:
        """Number of connections; unordered pairs count once if undirected."""
        nnz = int(np.count_nonzero(self.w))
        return nnz if self.directed else nnz // 2

    def measured_density(self) -> float:
        """Set bits over addressable bits (off-diagonal pairs for undirected)."""
        n = self.layout.n
        if self.directed:
            return int(np.count_nonzero(self.w)) / (n * n)
        pairs = n * (n - 1) // 2
        return self.count_connections() / pairs if pairs else 0.0

    def copy(self) -> "ConnectionMatrix":
        out = ConnectionMatrix(self.layout, self.directed)
        out.w[:] = self.w
        return out

    def same_bits(self, other: "ConnectionMatrix") -> bool:
        return (
            self.layout == other.layout
            and self.directed == other.directed
            and bool(np.array_equal(self.w, other.w))
        )

    # Snapshot format: ASCII header "CHI L DIRECTED\n", then n bit-packed rows,
    # row-major, most significant bit first within each byte.
    def save(self, path):
        packed = np.packbits(self.w, axis=1)
        with open(path, "wb") as f:
            f.write(f"{self.layout.chi} {self.layout.l} {int(self.directed)}\n".encode("ascii"))
            f.write(packed.tobytes())

    @classmethod
    def load(cls, path) -> "ConnectionMatrix":
        with open(path, "rb") as f:
            header = f.readline().split()
            if len(header) != 3:
                raise OSError(f"{path}: bad snapshot header")
            chi, l, directed = int(header[0]), int(header[1]), bool(int(header[2]))
            layout = ClusterLayout(chi, l)
            n = layout.n
            row_bytes = (n + 7) // 8
            raw = f.read(n * row_bytes)
        if len(raw) != n * row_bytes:
            raise OSError(f"{path}: truncated snapshot")
        m = cls(layout, directed=directed)
        packed = np.frombuffer(raw, dtype=np.uint8).reshape(n, row_bytes)
        m.w[:] = np.unpackbits(packed, axis=1, count=n)
        return m


@dataclass
class ActivationState:
    """Per-fanal integer scores and binary activation values."""

    layout: ClusterLayout
    scores: np.ndarray
    active: np.ndarray

    @classmethod
    def empty(cls, layout: ClusterLayout) -> "ActivationState":
        return cls(layout, np.zeros(layout.n, np.int32), np.zeros(layout.n, np.uint8))

    @classmethod
    def from_fanals(cls, layout: ClusterLayout, fanals) -> "ActivationState":
        state = cls.empty(layout)
        ids = as_fanal_ids(layout, fanals)
        state.active[ids] = 1
        return state

    def active_fanals(self) -> np.ndarray:
        return np.flatnonzero(self.active)


@dataclass(frozen=True)
class DecoderSpec:
    """Selection-rule choice plus its parameters."""

    rule: str
    theta: float | None = None
    alpha: int | None = None
    gamma: float = 0.0
    iterations: int = 1

    def __post_init__(self):
        if self.rule not in DECODER_RULES:
            raise ValueError(f"unknown rule {self.rule!r}, expected one of {DECODER_RULES}")
        if self.theta is not None and self.theta < 1:
            raise ValueError("theta must be >= 1")
        if self.alpha is not None and self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def plain_sum_scores(matrix: ConnectionMatrix, active_ids) -> np.ndarray:
    """Raw sum of contributions from every active fanal, over all fanals."""
    ids = np.asarray(active_ids, dtype=np.int64).ravel()
    if ids.size == 0:
        return np.zeros(matrix.layout.n, np.int32)
    return matrix.w[ids].sum(axis=0, dtype=np.int32)

def sum_of_max_scores(matrix: ConnectionMatrix, active_ids) -> np.ndarray:
    """Per-target sum over source clusters of the max contribution per cluster.

    Multiple active fanals inside one source cluster contribute at most 1 to a
    target, so after passing from k active clusters every score is <= k.
    """
    ids = np.asarray(active_ids, dtype=np.int64).ravel()
    scores = np.zeros(matrix.layout.n, np.int32)
    if ids.size == 0:
        return scores
    l = matrix.layout.l
    clusters = ids // l
    for c in np.unique(clusters):
        rows = matrix.w[ids[clusters == c]]
        scores += rows[0] if rows.shape[0] == 1 else rows.max(axis=0)
    return scores


def message_passing(matrix: ConnectionMatrix, sources, target_clusters=None,
                    mode: str = "sum_of_max") -> ActivationState:
    """One round of stimulus exchange along stored connections.

    ``mode`` is ``sum_of_max`` (per-source-cluster max, the sequential-decoder
    rule) or ``plain_sum`` (raw accumulation, the global-decoder rule). Scores
    outside ``target_clusters`` are zeroed when targets are given.
    """
    layout = matrix.layout
    if isinstance(sources, ActivationState):
        ids = sources.active_fanals()
    else:
        ids = as_fanal_ids(layout, sources)
    if mode == "sum_of_max":
        scores = sum_of_max_scores(matrix, ids)
    elif mode == "plain_sum":
        scores = plain_sum_scores(matrix, ids)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if target_clusters is not None:
        mask = np.zeros(layout.n, bool)
        for c in target_clusters:
            mask[layout.cluster_slice(c)] = True
        scores[~mask] = 0
    out = ActivationState.empty(layout)
    out.scores = scores
    return out
