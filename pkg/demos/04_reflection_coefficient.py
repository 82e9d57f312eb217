"""
Reflection of a plane wave from a penalized flat wall.

The matching system for the penalized half-space gives a reflection
coefficient R(eta, h). For eta = h -> 0 it approaches the phase-shifted
perfect reflection 1 - 2 i h k_x, and the leading correction scales like
sqrt(eta) h. The table shows the scaled correction approaching its limit.

Run:  python3 demos/04_reflection_coefficient.py
"""

import numpy as np

from fourier_penalty.oracles import reflection_expansion, reflection_matching

kx, ky = 1.0, 0.5
omega = np.hypot(kx, ky)
limit = abs(2 * np.sqrt(2) * (1 + 1j) * kx / np.sqrt(omega))
print(f"limit |2 sqrt2 (1+i) kx / sqrt(omega)| = {limit:.4f}")
print(f"{'j':>3s} {'eta=h':>10s} {'|R|':>9s} {'scaled corr.':>13s} {'|R - expansion|':>16s}")
for j in range(4, 11):
    eta = h = 2.0**-j
    R = reflection_matching(eta, h, kx, ky)
    scaled = abs(R - (1 - 2j * h * kx)) / (np.sqrt(eta) * h)
    err = abs(R - reflection_expansion(eta, h, kx, ky))
    print(f"{j:3d} {eta:10.3e} {abs(R):9.6f} {scaled:13.4f} {err:16.3e}")
