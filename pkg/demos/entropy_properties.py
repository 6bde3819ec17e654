"""The pure-state monotone s(p) behaves like an entropy on up to four levels.

It vanishes on pure spectra, ignores appended zeros and decreases when the
spectrum gets purer. With five or more levels the last property can fail,
because only the four largest probabilities enter.
"""

import numpy as np

from monogamy import majorizes, majorizing_pair, pure_monotone

rng = np.random.default_rng(0)

print("s(1) =", pure_monotone([1.0]))
print("s(1/2, 1/2) =", pure_monotone([0.5, 0.5]), " vs sqrt2 - 1 =", np.sqrt(2) - 1)
print("s(p) == s(p, 0):", pure_monotone([0.7, 0.2, 0.1]) == pure_monotone([0.7, 0.2, 0.1, 0.0]))

for d in (4, 5, 6):
    bad = 0
    for _ in range(2000):
        q, p = majorizing_pair(d, rng)
        bad += pure_monotone(q) > pure_monotone(p) + 1e-12
    print(f"d={d}: {bad}/2000 majorizing pairs with s(q) > s(p)")

p = np.array([0.3, 0.25, 0.2, 0.15, 0.1])
q = np.array([0.3, 0.25, 0.25, 0.2, 0.0])
print(f"\nexample: q majorizes p: {majorizes(q, p)}, s(q)={pure_monotone(q):.4f} > s(p)={pure_monotone(p):.4f}")
