"""Milestone sets: quantization tables trading weight precision for code length.

A milestone set for (n, k) is a strictly increasing sequence of integers from
1 up to L, the smallest power of two >= n.  Every edge weight is rounded up to
the nearest milestone, so only the milestone index (code_length bits) has to
live in mutable node memory.  Larger k means denser milestones: finer
approximation, wider indices.

All arithmetic here is exact integer / rational; no floats.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction


def next_pow2(n: int) -> int:
    """Smallest power of two >= n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1 << (n - 1).bit_length()


def valid_k_range(n: int, max_weight: int | None = None) -> tuple[int, int]:
    """Inclusive (k_min, k_max) for a network of n nodes.

    k_max = log2(L) - 1 is the exact regime (every integer in [1, L] is a
    milestone); k_min = -floor(log2 log2 L) is the coarsest.  Passing
    max_weight > n widens L (and so the range) for networks whose weights
    exceed n; the codec then spends correspondingly more bits per weight.
    """
    if n < 2:
        raise ValueError("milestone sets need n >= 2")
    top = max(n, max_weight or 0)
    lg = next_pow2(top).bit_length() - 1  # log2 L >= 1
    return -(lg.bit_length() - 1), lg - 1


@dataclass(frozen=True)
class MilestoneSet:
    """Quantization table for a fixed (n, k)."""

    n: int
    k: int
    milestones: tuple[int, ...]
    L: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "L", self.milestones[-1])

    def __len__(self) -> int:
        return len(self.milestones)

    def __contains__(self, w: int) -> bool:
        i = bisect_left(self.milestones, w)
        return i < len(self.milestones) and self.milestones[i] == w


def milestone_set(n: int, k: int, max_weight: int | None = None) -> MilestoneSet:
    """Build the milestone set for trade-off parameter k.

    Start from the doubling series 1, 2, 4, ..., L (k = 0).  Each step up
    inserts the midpoint of every non-empty gap; each step down deletes every
    other milestone, always keeping the last.  max_weight widens L beyond n
    for networks carrying polynomially large weights.
    """
    k_min, k_max = valid_k_range(n, max_weight)
    if not k_min <= k <= k_max:
        raise ValueError(f"k={k} outside valid range [{k_min}, {k_max}] for n={n}")
    L = next_pow2(max(n, max_weight or 0))
    ms = [1 << i for i in range(L.bit_length())]  # 1, 2, 4, ..., L
    for _ in range(k):
        out = [ms[0]]
        for a, b in zip(ms, ms[1:]):
            if b - a >= 2:
                out.append((a + b) // 2)
            out.append(b)
        ms = out
    for _ in range(-k):
        kept = ms[::2]
        if kept[-1] != ms[-1]:
            kept.append(ms[-1])
        ms = kept
    return MilestoneSet(n=n, k=k, milestones=tuple(ms))


def transform(w: int, ms: MilestoneSet) -> int:
    """Round w up to the nearest milestone."""
    if not 1 <= w <= ms.L:
        raise ValueError(f"weight {w} outside [1, {ms.L}]")
    return ms.milestones[bisect_left(ms.milestones, w)]


def approximation_bound(k: int, n: int, max_weight: int | None = None) -> Fraction:
    """Worst-case multiplicative rounding error, as an exact rational.

    1 in the exact regime (k = log L - 1), 1 + 1/2^k for intermediate k >= 0,
    and 2^(2^-k) for negative k.
    """
    k_min, k_max = valid_k_range(n, max_weight)
    if not k_min <= k <= k_max:
        raise ValueError(f"k={k} outside valid range [{k_min}, {k_max}] for n={n}")
    if k == k_max:
        return Fraction(1)
    if k >= 0:
        return 1 + Fraction(1, 2**k)
    return Fraction(2 ** (2 ** (-k)))


def code_length(ms: MilestoneSet) -> int:
    """Bits needed for a milestone index; the field width s used by protocols."""
    return max(1, (len(ms.milestones) - 1).bit_length())


def index_of(w: int, ms: MilestoneSet) -> int:
    """Index of milestone w in the sorted set; rejects non-milestones."""
    i = bisect_left(ms.milestones, w)
    if i == len(ms.milestones) or ms.milestones[i] != w:
        raise ValueError(f"{w} is not a milestone of (n={ms.n}, k={ms.k})")
    return i


def milestone_at(i: int, ms: MilestoneSet) -> int:
    """Milestone value at index i."""
    if not 0 <= i < len(ms.milestones):
        raise ValueError(f"index {i} out of range [0, {len(ms.milestones)})")
    return ms.milestones[i]


def transform_index(w: int, ms: MilestoneSet) -> int:
    """Index of the milestone w rounds up to."""
    if not 1 <= w <= ms.L:
        raise ValueError(f"weight {w} outside [1, {ms.L}]")
    return bisect_left(ms.milestones, w)
