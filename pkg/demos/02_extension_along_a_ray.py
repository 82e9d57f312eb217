"""
How the active penalty builds its target field along one ray.

For a point x = y + s n the target blends the wall value g (at s = 0) with
the solution and its normal derivatives sampled at s = h, then fades to zero
at s = -L. This prints the blending polynomials and the resulting target
for a smooth profile, so you can see each collocation condition hold.

Run:  python3 demos/02_extension_along_a_ray.py
"""

import numpy as np

from fourier_penalty.penalty import basis_1d

h, L = 0.1, 0.5
s = np.linspace(-L, h, 13)

for m in (0, 1, 2):
    P = basis_1d(m, h, L, s)
    print(f"\nm = {m}: columns P_{{m,0}} .. P_{{m,{m + 1}}}")
    for si, row in zip(s, P.T):
        print(f"  s={si:+.3f}  " + "  ".join(f"{v:+.4f}" for v in row))

# Extension of E(s) = cos(3 s) with homogeneous wall data g = 0.
f = lambda s: np.cos(3 * s)
data = [0.0, f(h), -3 * np.sin(3 * h), -9 * np.cos(3 * h)]
print("\nextension of cos(3s) with g = 0")
for m in (0, 1, 2):
    P = basis_1d(m, h, L, s)
    ext = sum(data[j] * P[j] for j in range(m + 2))
    print(f"  m={m}: value at s=0 -> {ext[np.argmin(abs(s))]:+.2e}, at s=h -> {ext[-1]:+.6f} (E(h) = {f(h):+.6f})")
