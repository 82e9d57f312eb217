"""
Closed-form reference solutions, Bessel functions and the flat-wall
reflection-coefficient model used to check the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


# ---------------------------------------------------------------------------
# 1D Gaussian packet reflecting off x = 0
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PulseParams:
    E0: float = 1.0
    x0: float = 7.0
    sigma: float = 1.0 / np.sqrt(2.0)
    omega0: float = 10.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def f(self, a):
        a = np.asarray(a, dtype=float)
        return np.exp(-0.5 * (a / self.sigma) ** 2) * np.sin(self.omega0 * a)


def gaussian_1d_exact(x, t: float, p: PulseParams = PulseParams()):
    """Incident plus reflected packet on ``x >= 0``, zero in the conductor.

    Returns ``(H_y, E_z)``.
    """
    x = np.asarray(x, dtype=float)
    chi0 = (x >= 0).astype(float)
    inc = p.f(t + x - p.x0)
    ref = p.f(t - x - p.x0)
    return p.E0 * (inc + ref) * chi0, p.E0 * (inc - ref) * chi0


# ---------------------------------------------------------------------------
# 2D manufactured solutions
# ---------------------------------------------------------------------------


def manufactured_forcing(x, y, t):
    """Forcing ``sin x cos y sin t`` shared by the TM and TE manufactured problems."""
    return np.sin(x) * np.cos(y) * np.sin(t)


def manufactured_tm_exact(x, y, t):
    """``(H_x, H_y, E_z)`` solving the forced TM system."""
    st, ct = np.sin(t), np.cos(t)
    return (
        np.sin(x) * np.sin(y) * st,
        np.cos(x) * np.cos(y) * st,
        np.sin(x) * np.cos(y) * ct,
    )


def manufactured_te_exact(x, y, t):
    """``(E_x, E_y, H_z)`` solving the forced TE system."""
    st, ct = np.sin(t), np.cos(t)
    return (
        -np.sin(x) * np.sin(y) * st,
        -np.cos(x) * np.cos(y) * st,
        np.sin(x) * np.cos(y) * ct,
    )


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------

_BIG = 1e200


def bessel_j_all(nmax: int, x) -> np.ndarray:
    """``J_0 .. J_nmax`` at ``x`` by Miller's downward recurrence.

    The unnormalized sequence is scaled with ``J_0 + 2 sum_k J_2k = 1``.
    Returns an array of shape ``(nmax + 1,) + shape(x)``.
    """
    if nmax < 0:
        raise ValueError("order must be nonnegative")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    xf = x.ravel()
    out = np.zeros((nmax + 1, xf.size))
    zero = xf == 0
    out[0, zero] = 1.0
    xs = xf[~zero]
    if xs.size:
        M = int(np.max(xs)) + nmax + 40 + int(np.sqrt(40.0 * (nmax + 10)))
        M += M % 2
        jp1 = np.zeros_like(xs)
        j = np.full_like(xs, 1e-30)
        norm = np.zeros_like(xs)
        vals = np.zeros((nmax + 1, xs.size))
        for k in range(M, 0, -1):
            # j = J_k (unnormalized); produce J_{k-1}
            jm1 = 2.0 * k / xs * j - jp1
            jp1, j = j, jm1
            if k - 1 <= nmax:
                vals[k - 1] = j
            if (k - 1) % 2 == 0 and k - 1 > 0:
                norm += 2.0 * j
            big = np.abs(j) > _BIG
            if big.any():
                s = np.where(big, 1.0 / _BIG, 1.0)
                j, jp1, norm = j * s, jp1 * s, norm * s
                vals *= s
        norm += j
        out[:, ~zero] = vals / norm
    return out.reshape((nmax + 1,) + x.shape)


def bessel_j(order: int, x):
    """Bessel function of the first kind ``J_order(x)`` for ``x >= 0``."""
    if order < 0 or int(order) != order:
        raise ValueError("order must be a nonnegative integer")
    return bessel_j_all(int(order), x)[int(order)]


def bessel_series(order: int, x, terms: int = 80):
    """Power series ``sum (-1)^k (x/2)^(2k+n) / (k! (k+n)!)``, accurate for moderate ``x``."""
    from math import lgamma

    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    half = x / 2.0
    for k in range(terms):
        with np.errstate(divide="ignore"):
            logc = -(lgamma(k + 1) + lgamma(k + order + 1))
        total = total + (-1) ** k * np.exp(logc) * half ** (2 * k + order)
    return total


def bessel_root(order: int, j: int, step: float = 0.1, tol: float = 1e-14) -> float:
    """``j``-th positive zero of ``J_order`` by bracketing and bisection."""
    if j < 1:
        raise ValueError("root index starts at 1")
    a = step
    fa = bessel_j(order, a)
    found = 0
    while True:
        b = a + step
        fb = bessel_j(order, b)
        if fa == 0.0:
            found += 1
            if found == j:
                return a
        elif fa * fb < 0:
            found += 1
            if found == j:
                break
        a, fa = b, fb
        if a > 1e4:
            raise RuntimeError("root not bracketed")
    lo, hi, flo = a, b, fa
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        fm = bessel_j(order, mid)
        if fm == 0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Cavity eigenmode
# ---------------------------------------------------------------------------


def cavity_mode_exact(i: int, alpha: float, rho, phi, t):
    """Polar ``(H_rho, H_phi, E_z)`` of the TM cavity mode with ``J_i(alpha) = 0``."""
    if i < 1:
        raise ValueError("mode order i must be >= 1")
    rho = np.asarray(rho, dtype=float)
    J = bessel_j_all(i + 1, alpha * rho)
    Ji, Jm, Jp = J[i], J[i - 1], J[i + 1]
    # i J_i(a r) / (a r) = (J_{i-1} + J_{i+1}) / 2, finite at r = 0
    ratio = 0.5 * (Jm + Jp)
    st, ct = np.sin(alpha * t), np.cos(alpha * t)
    Hr = ratio * np.sin(i * phi) * st
    Hp = 0.5 * (Jm - Jp) * np.cos(i * phi) * st
    Ez = Ji * np.cos(i * phi) * ct
    return Hr, Hp, Ez


def cavity_mode_cartesian(i: int, alpha: float, x, y, t, center=(0.0, 0.0)):
    """Cartesian ``(H_x, H_y, E_z)`` of :func:`cavity_mode_exact`."""
    dx = np.asarray(x, dtype=float) - center[0]
    dy = np.asarray(y, dtype=float) - center[1]
    rho = np.hypot(dx, dy)
    phi = np.arctan2(dy, dx)
    Hr, Hp, Ez = cavity_mode_exact(i, alpha, rho, phi, t)
    c, s = np.cos(phi), np.sin(phi)
    return Hr * c - Hp * s, Hr * s + Hp * c, Ez


# ---------------------------------------------------------------------------
# 3D standing wave
# ---------------------------------------------------------------------------

K3 = np.ones(3) / np.sqrt(3.0)
E0_3D = np.array([1.0, -2.0, 1.0])
T0_3D = np.pi / (2.0 * np.sqrt(3.0))


def standing_wave_3d_exact(x, t, k=K3, E0=E0_3D):
    """``E = 2 E0 cos(sqrt3 t) cos(sqrt3 k.x)``, ``H = 2 (k x E0) sin(sqrt3 t) sin(sqrt3 k.x)``.

    ``x`` has shape ``(3, ...)``; returns ``(E, H)`` of the same shape.
    """
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    E0 = np.asarray(E0, dtype=float)
    phase = np.sqrt(3.0) * np.tensordot(k, x, axes=1)
    bshape = (3,) + (1,) * (x.ndim - 1)
    E = 2.0 * E0.reshape(bshape) * np.cos(np.sqrt(3.0) * t) * np.cos(phase)
    H = 2.0 * np.cross(k, E0).reshape(bshape) * np.sin(np.sqrt(3.0) * t) * np.sin(phase)
    return E, H


# ---------------------------------------------------------------------------
# Flat-wall reflection model
# ---------------------------------------------------------------------------


def _gamma(omega, ky, eta):
    g2 = omega**2 - ky**2 - 1j * omega / eta
    r = np.sqrt(complex(g2))
    cands = [r, -r]
    # decay into the conductor needs Re(i gamma) >= 0; ties go to Im(i gamma) <= 0
    cands.sort(key=lambda g: (-(1j * g).real, (1j * g).imag))
    best = cands[0]
    if (1j * best).real < 0:
        raise ArithmeticError("no decaying root")
    return best


def reflection_matching(eta: float, h: float, kx: float, ky: float, return_E0: bool = False):
    """Reflection coefficient of the penalized flat wall with a quadratic extension.

    Solves the two continuity conditions at ``x = h`` for ``(E_0, R)`` with
    unit incident amplitude.
    """
    if not (eta > 0 and h > 0):
        raise ValueError("eta and h must be positive")
    omega = float(np.hypot(kx, ky))
    if omega == 0:
        raise ValueError("omega must be nonzero")
    g = _gamma(omega, ky, eta)
    a = 1j * omega / (eta * h * (h + 1.0))
    c1 = 2.0 / g**4 - h / g**2 - h * h / g**2
    c2 = -1.0 / g**2 - 2.0 * h / g**2
    M = np.array([[1.0, 1.0 - a * c1], [1j * g, -a * c2 - 1j * kx]], dtype=complex)
    rhs = np.array([1.0 - a * c1, 1j * kx - a * c2], dtype=complex)
    if abs(np.linalg.det(M)) < 1e-300:
        raise np.linalg.LinAlgError("singular matching system")
    E0, R = np.linalg.solve(M, rhs)
    return (R, E0) if return_E0 else R


def reflection_expansion(eta: float, h: float, kx: float, ky: float) -> complex:
    """Small-(eta, h) expansion of the reflection coefficient through order ``eta h``."""
    omega = float(np.hypot(kx, ky))
    return (
        (1 - 2j * h * kx)
        - 2 * np.sqrt(2) * (1 + 1j) * kx * omega**-0.5 * np.sqrt(eta) * h
        + 2 * kx / omega * (kx**2 - 4) * eta * h
    )
