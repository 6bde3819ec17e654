"""The curve f(y): the smallest pure-state monotone compatible with a given y = (sum sqrt p)^2.

Beyond the threshold x*, f exceeds sqrt(2) - 1 and the reduced state can no
longer violate CHSH at all.
"""

import numpy as np

from monogamy import f_closed, f_oracle, threshold_x

print(" y      f_closed    f_oracle    diff")
for y in np.linspace(1.0, 4.0, 7):
    fc, fo = f_closed(y), f_oracle(y)
    print(f"{y:5.2f}  {fc:.8f}  {fo:.8f}  {fo - fc:+.1e}")

x = threshold_x()
print(f"\nthreshold x* = {x:.10f}, f(x*) = {f_closed(x):.12f}, sqrt(2)-1 = {np.sqrt(2) - 1:.12f}")

# two-level reduced states: every pure 4x2 state sits exactly on this curve
print("\nqubit partner, f(y) = sqrt2 - sqrt(2 - (y-1)^2):")
for y in (1.0, 1.5, 2.0):
    print(f"  y={y}: oracle {f_oracle(y, d_star=2):.10f}  formula {np.sqrt(2) - np.sqrt(2 - (y - 1) ** 2):.10f}")
