"""
Active penalty fields: smooth extensions of the solution through the boundary data.

Each grid point ``x = y + s n`` in the band ``-L <= s <= h`` receives a blend
of the boundary value at ``s = 0`` and the solution (and, for ``m >= 1``, its
normal derivatives) sampled at ``y + h n``. The blend uses polynomials
``P_{m,j}(s)`` of degree ``2m + 3`` that vanish smoothly at ``s = -L``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import RayTable
from .spectral import Grid, spectral_derivative

# relative slack on the [-L, h] domain check for basis evaluation
_DOMAIN_EPS = 1e-9


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty parameters.

    Parameters
    ----------
    eta : float
        Penalty time scale; the forcing is ``-(E - g~) / eta`` on the mask.
    h : float
        Matching offset off the boundary.
    L : float
        Decay length into the conductor.
    m : int
        Number of normal derivatives matched at ``s = h``.
    c_f : float or None
        Filter coefficient for the matching derivatives.
    """

    eta: float
    h: float
    L: float
    m: int = 0
    c_f: Optional[float] = 16.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.h > 0:
            raise ValueError("h must be positive")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.m not in (0, 1, 2):
            raise ValueError("m must be 0, 1 or 2")
        if self.c_f is not None and self.c_f < 0:
            raise ValueError("c_f must be nonnegative")


def basis_1d(m: int, h: float, L: float, s) -> np.ndarray:
    """Extension polynomials ``P_{m,0}(s), ..., P_{m,m+1}(s)``.

    Returns an array of shape ``(m + 2,) + shape(s)``.
    """
    s = np.asarray(s, dtype=float)
    tol = _DOMAIN_EPS * max(h, L)
    if np.any(s < -L - tol) or np.any(s > h + tol):
        raise ValueError("s must lie in [-L, h]")
    sh = s - h
    sL = s + L
    hL = h + L
    if m == 0:
        return np.stack([-sh * sL**2 / (h * L**2), s * sL**2 / (h * hL**2)])
    if m == 1:
        q = s * sL**3 / (h * hL**3)
        return np.stack(
            [
                sL**3 * sh**2 / (h**2 * L**3),
                q * (1.0 - (4 * h + L) * sh / (h * hL)),
                q * sh,
            ]
        )
    if m == 2:
        q = s * sL**4 / (h * hL**4)
        a1 = (5 * h + L) / (h * hL)
        a2 = (15 * h * h + 6 * h * L + L * L) / (h * h * hL * hL)
        return np.stack(
            [
                -(sL**4) * sh**3 / (h**3 * L**4),
                q * (1.0 - a1 * sh + a2 * sh**2),
                q * sh * (1.0 - a1 * sh),
                0.5 * q * sh**2,
            ]
        )
    raise ValueError("m must be 0, 1 or 2")


def _eval_g(g, pts: np.ndarray, t: float, ncomp: int) -> np.ndarray:
    # Boundary data as an (n,) or (n, ncomp) array; None means homogeneous.
    n = pts.shape[0]
    shape = (n,) if ncomp == 1 else (n, ncomp)
    if g is None:
        return np.zeros(shape)
    if callable(g):
        val = np.asarray(g(pts, t), dtype=float)
    else:
        val = np.asarray(g, dtype=float)
    return np.broadcast_to(val, shape).astype(float)


class PenaltyOperator:
    """Precomputed ray data that turns a field snapshot into ``g~``.

    Parameters
    ----------
    grid : Grid
    rays : RayTable
    cfg : PenaltyConfig
    mode : {"1d", "tm", "te", "3d"}
    g : callable or None
        Boundary data ``g(points, t)``; scalar for 1D/TM, vector for TE/3D.
    """

    def __init__(self, grid: Grid, rays: RayTable, cfg: PenaltyConfig, mode: str, g: Optional[Callable] = None):
        if mode not in ("1d", "tm", "te", "3d"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "1d" and grid.dim != 1 or mode in ("tm", "te") and grid.dim != 2 or mode == "3d" and grid.dim != 3:
            raise ValueError(f"mode {mode} does not match grid dimension {grid.dim}")
        if mode == "tm" and cfg.m > 1:
            raise ValueError("TM extension supports m <= 1")
        if mode in ("te", "3d") and cfg.m != 0:
            raise ValueError("vector extension supports m = 0 only")
        if abs(rays.h - cfg.h) > 1e-12 * cfg.h or abs(rays.L - cfg.L) > 1e-12 * cfg.L:
            raise ValueError("ray table was built for different h or L")
        self.grid, self.rays, self.cfg, self.mode, self.g = grid, rays, cfg, mode, g
        self.P = basis_1d(cfg.m, cfg.h, cfg.L, np.clip(rays.s, -cfg.L, cfg.h))
        self.Mh = rays.interp("h") if len(rays) else None
        self.My = rays.interp("y") if mode in ("te", "3d") and len(rays) else None
        # derivative used for matching; replaceable by comparator schemes
        self.deriv = None

    @property
    def vector(self) -> bool:
        return self.mode in ("te", "3d")

    def _derivative(self, f, axis, order):
        if self.deriv is not None:
            return self.deriv(f, axis, order)
        return spectral_derivative(f, self.grid, axis=axis, order=order, c_f=self.cfg.c_f)

    def boundary_values(self, t: float) -> np.ndarray:
        ncomp = self.grid.dim if self.vector else 1
        return _eval_g(self.g, self.rays.y, t, ncomp)

    def scalar(self, Ez: np.ndarray, t: float, g_values=None) -> np.ndarray:
        """``g~`` for a scalar unknown (1D or TM), returned on the full grid."""
        grid, cfg, rays = self.grid, self.cfg, self.rays
        out = np.zeros(grid.size)
        if len(rays) == 0:
            return out.reshape(grid.shape)
        gv = self.boundary_values(t) if g_values is None else g_values
        acc = gv * self.P[0] + (self.Mh @ Ez.ravel()) * self.P[1]
        if cfg.m >= 1:
            dn = np.zeros(len(rays))
            for a in range(grid.dim):
                da = self._derivative(Ez, a, 1)
                dn += rays.n[:, a] * (self.Mh @ da.ravel())
            acc += dn * self.P[2]
        if cfg.m == 2:
            if grid.dim != 1:
                raise ValueError("m = 2 is only available in 1D")
            d2 = self._derivative(Ez, 0, 2)
            # n = +-1 so the second normal derivative is d2 itself
            acc += (self.Mh @ d2.ravel()) * self.P[3]
        out[rays.index] = acc
        return out.reshape(grid.shape)

    def vector_field(self, E: np.ndarray, t: float, g_values=None) -> np.ndarray:
        """``g~`` for the electric field vector (TE or 3D), shape ``(dim, *grid.shape)``."""
        grid, rays = self.grid, self.rays
        d = grid.dim
        out = np.zeros((d, grid.size))
        if len(rays) == 0:
            return out.reshape((d,) + grid.shape)
        n = rays.n
        gv = self.boundary_values(t) if g_values is None else g_values
        Ef = E.reshape(d, -1)
        Ey = (self.My @ Ef.T)
        Eh = (self.Mh @ Ef.T)
        En = np.sum(Ey * n, axis=1, keepdims=True)
        gn = np.sum(gv * n, axis=1, keepdims=True)
        at_wall = En * n + (gv - gn * n)
        val = at_wall * self.P[0][:, None] + Eh * self.P[1][:, None]
        out[:, rays.index] = val.T
        return out.reshape((d,) + grid.shape)

    def __call__(self, E: np.ndarray, t: float) -> np.ndarray:
        return self.vector_field(E, t) if self.vector else self.scalar(E, t)


def _operator(cfg, rays, g, mode):
    return PenaltyOperator(rays.grid, rays, cfg, mode, g)


def build_gtilde_1d(cfg: PenaltyConfig, Ez: np.ndarray, rays: RayTable, g=None, t: float = 0.0) -> np.ndarray:
    """1D extension ``g P_{m,0} + E(h) P_{m,1} + E'(h) P_{m,2} + E''(h) P_{m,3}``."""
    return _operator(cfg, rays, g, "1d").scalar(np.asarray(Ez, dtype=float), t)


def build_gtilde_tm(cfg: PenaltyConfig, Ez: np.ndarray, rays: RayTable, g=None, t: float = 0.0) -> np.ndarray:
    """TM ray extension of ``E_z``; ``m = 1`` matches ``(n . grad) E_z`` at ``y + h n``."""
    return _operator(cfg, rays, g, "tm").scalar(np.asarray(Ez, dtype=float), t)


def build_gtilde_vector(cfg: PenaltyConfig, E: np.ndarray, rays: RayTable, g=None, t: float = 0.0, mode: str = "te") -> np.ndarray:
    """Vector extension penalizing the tangential part of ``E`` only.

    At ``s = 0`` the normal part equals that of ``E(y)`` and the tangential
    part equals that of ``g``; at ``s = h`` it equals ``E(y + h n)``.
    """
    if mode not in ("te", "3d"):
        raise ValueError("mode must be 'te' or '3d'")
    return _operator(cfg, rays, g, mode).vector_field(np.asarray(E, dtype=float), t)
