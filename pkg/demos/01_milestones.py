#!/usr/bin/env python3
"""The memory/approximation dial: milestone sets across the whole k range.

Each row doubles as a data point of the trade-off: denser milestones cost
more bits per stored weight but round weights less aggressively.
"""

from fractions import Fraction

from stabspan import (approximation_bound, code_length, milestone_set,
                      transform, valid_k_range)

N = 1024

print(f"n = {N}: valid trade-off parameters {valid_k_range(N)}\n")
print(f"{'k':>4} {'milestones':>11} {'bits/weight':>12} {'approx bound':>13}")
lo, hi = valid_k_range(N)
for k in range(lo, hi + 1):
    ms = milestone_set(N, k)
    bound = approximation_bound(k, N)
    print(f"{k:>4} {len(ms.milestones):>11} {code_length(ms):>12} "
          f"{str(bound):>13}")

print("\nThe two regimes the trade-off interpolates between:")
coarse = milestone_set(N, lo)
exact = milestone_set(N, hi)
print(f"  k={lo}: {coarse.milestones} -> any weight fits in "
      f"{code_length(coarse)} bit(s), quality only poly-bounded")
print(f"  k={hi}: every integer in [1, {N}] is a milestone "
      f"({code_length(exact)} bits), rounding is lossless")

print("\nRounding a few weights at k = 0 (doubling milestones):")
ms0 = milestone_set(16, 0)
print(f"  milestones for n=16: {ms0.milestones}")
for w in (1, 2, 3, 5, 9, 16):
    t = transform(w, ms0)
    print(f"  w={w:>2} -> {t:>2}   (factor {Fraction(t, w)})")
