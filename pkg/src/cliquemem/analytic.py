"""Closed-form model layer: network density, error rates, capacity, efficiency.

Every function is pure and accepts real-valued parameters, so non-integral
cluster sizes (for instance l = 4096/20 = 204.8) evaluate exactly as printed.
``expm1``/``log1p`` are used throughout; the formulas stay accurate for
per-pair probabilities down to 1/l^2 ~ 1e-16.
"""
from __future__ import annotations

import math

__all__ = [
    "capacity_seq",
    "chi_opt",
    "density_restricted",
    "density_seq",
    "density_seq_approx",
    "dmin",
    "efficiency_seq",
    "memory_bits_seq",
    "merit",
    "pattern_bits",
    "rate",
    "solve_sequence_capacity",
    "sqer_restricted",
    "sqer_seq",
    "structural_sber",
]


# -- ring-degenerated clique code parameters ---------------------------------

def dmin(r: int) -> int:
    """Minimum Hamming distance of the 2r-connected ring code: one vertex off."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return 4 * r


def rate(r: int, c: int) -> float:
    """Coding rate: minimum edges specifying a pattern over edges used (r*c)."""
    if r < 1 or c < 2:
        raise ValueError("need r >= 1 and c >= 2")
    return ((c + 1) // 2) / (r * c)


def merit(r: int, c: int) -> float:
    """Merit factor dmin * rate, computed in one division so even c gives 2.0 exactly."""
    if r < 1 or c < 2:
        raise ValueError("need r >= 1 and c >= 2")
    return (dmin(r) * ((c + 1) // 2)) / (r * c)


# -- symbol-sequence chains ---------------------------------------------------

def density_seq(chi: float, l: float, S: float, L: float) -> float:
    """Connection density after storing S length-L symbol sequences.

    Exact binomial form 1 - (1 - 1/l^2)^(S*L/chi); assumes chi divides L.
    """
    if S < 0 or L < 0 or chi <= 0 or l <= 0:
        raise ValueError("parameters must be positive (S, L may be zero)")
    if S == 0 or L == 0:
        return 0.0
    return -math.expm1((S * L / chi) * math.log1p(-1.0 / (l * l)))


def density_seq_approx(chi: float, l: float, S: float, L: float) -> float:
    """Low-density linearization S*L / (chi * l^2)."""
    if chi <= 0 or l <= 0:
        raise ValueError("chi and l must be positive")
    return S * L / (chi * l * l)


def structural_sber(d: float, r: float, l: float) -> float:
    """Single-step symbol error floor with perfect upstream information."""
    if not 0.0 <= d <= 1.0:
        raise ValueError("density must be in [0, 1]")
    if r < 1:
        raise ValueError("r must be >= 1")
    if d == 0.0:
        return 0.0
    if d == 1.0:
        return 1.0
    return -math.expm1((l - 1.0) * math.log1p(-(d ** r)))


def sqer_seq(chi: float, l: float, r: float, L: float, S: float) -> float:
    """Sequence error probability over the L - r decoded steps."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if L <= r:
        raise ValueError("L must exceed r")
    d = density_seq(chi, l, S, L)
    if d == 0.0:
        return 0.0
    if d == 1.0:
        return 1.0
    return -math.expm1((l - 1.0) * (L - r) * math.log1p(-(d ** r)))


def chi_opt(n: float, S: float, L: float) -> float:
    """Cluster count minimizing the sequence error rate at full anticipation."""
    if n <= 0 or S <= 0 or L <= 0:
        raise ValueError("n, S, L must be positive")
    return n * n / (math.e * S * L)


def capacity_seq(S: float, L: float, l: float) -> float:
    """Stored bits: S sequences of L symbols over an alphabet of size l."""
    return S * L * math.log2(l)


def memory_bits_seq(r: float, chi: float, l: float) -> float:
    """Available connection bits of the chain: r * chi * l^2."""
    return r * chi * l * l


def efficiency_seq(chi: float, l: float, r: float, L: float, S: float) -> float:
    """Stored bits over available bits for the symbol-sequence chain."""
    return capacity_seq(S, L, l) / memory_bits_seq(r, chi, l)


def solve_sequence_capacity(chi: float, l: float, r: float, L: float,
                            target: float = 0.01) -> float:
    """Largest S with sequence error probability <= target (bisection).

    The error probability is monotone increasing in S, so plain bisection on S
    converges; the bracket is grown by doubling first.
    """
    if not 0.0 < target < 1.0:
        raise ValueError("target must be in (0, 1)")
    lo, hi = 0.0, 1.0
    while sqer_seq(chi, l, r, L, hi) < target:
        lo, hi = hi, hi * 2.0
        if hi > 1e30:
            raise ValueError("no finite S reaches the target error rate")
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if sqer_seq(chi, l, r, L, mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


# -- vectorial chains under cluster-activity restriction ----------------------

def density_restricted(n: float, r: float, c: float, S: float, L: float) -> float:
    """Density after storing S restricted vectorial sequences of order c."""
    if n <= 0 or r < 1 or c < 1:
        raise ValueError("need n > 0, r >= 1, c >= 1")
    frac = r * c * c / (n * n)
    if frac >= 1.0:
        return 1.0
    return -math.expm1(S * L * math.log1p(-frac))


def sqer_restricted(chi: float, l: float, r: float, c: float, S: float, L: float,
                    future_competition: bool = False) -> float:
    """Sequence error probability for restricted vectorial decoding.

    Per step, each of the n - r*l - r*c ordinary competitor fanals needs r*c
    spurious connections to tie the target score. With ``future_competition``
    the partially pre-stimulated fanals of the next r - 1 patterns are also
    charged (the stricter variant); the default omits that factor, which is
    the variant whose best operating point sits at r*c ~ 25.
    """
    if r < 1 or c < 1:
        raise ValueError("r and c must be >= 1")
    if L <= r:
        raise ValueError("L must exceed r")
    n = chi * l
    d = density_restricted(n, r, c, S, L)
    if d <= 0.0:
        return 0.0
    if d >= 1.0:
        return 1.0
    others = n - r * l - r * c
    if others < 0:
        raise ValueError("r too large for this layout")
    log_ok = others * math.log1p(-(d ** (r * c)))
    if future_competition:
        for i in range(1, int(r)):
            log_ok += c * math.log1p(-(d ** (i * c)))
    return -math.expm1((L - r) * log_ok)


# -- vectorial information accounting -----------------------------------------

def _log2_comb(chi: float, c: float) -> float:
    if float(chi).is_integer() and float(c).is_integer():
        return math.log2(math.comb(int(chi), int(c)))
    return (math.lgamma(chi + 1) - math.lgamma(c + 1) - math.lgamma(chi - c + 1)) / math.log(2)


def pattern_bits(chi: float, l: float, c: float) -> float:
    """Information carried by one sparse pattern: symbols plus cluster choice."""
    if not 0 < c <= chi:
        raise ValueError("need 0 < c <= chi")
    return c * math.log2(l) + _log2_comb(chi, c)
