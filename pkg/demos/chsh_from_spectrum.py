"""How much CHSH violation can a four-level state give?

The best value depends only on the spectrum. We build the projector family
explicitly, rotate it onto the state's eigenbasis, and compare the measured
value with the closed form.
"""

import numpy as np

from monogamy import (
    ChshObservables,
    build_chsh_observables,
    chsh_full_value,
    chsh_oracle_search,
    sample_mixed,
)

np.set_printoptions(precision=4, suppress=True)

print("Spectrum of T along the family (nu1 = nu2 = nu):")
for nu in (0.0, 0.3, np.sqrt(0.5), 0.9):
    _, w = build_chsh_observables(ChshObservables(nu, nu))
    print(f"  nu={nu:.3f}  r={w.r:.4f}  lambda(T)={w.spectrum}")

print("\nRandom states, explicit search vs closed form:")
for rank in (1, 2, 3, 4):
    rho = sample_mixed(4, rank, seed=rank)
    res = chsh_oracle_search(rho, budget=20_000, seed=rank)
    p = rho.spectrum()
    print(f"  rank {rank}: p={p}  closed={chsh_full_value(p):.6f}  "
          f"search={res.value:.6f}  |T^2-4I+16R|<={res.identity_residual:.1e}")
