"""
Right-hand sides of the penalized Maxwell systems.

Units are normalized so that epsilon = mu = c = 1. State arrays have shape
``(ncomp, *grid.shape)`` with the component order listed in ``COMPONENTS``.
Every function here is linear in the state once the boundary data and the
forcing are set to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .penalty import PenaltyOperator
from .spectral import Grid, spectral_derivative

COMPONENTS = {
    "1d": ("Hy", "Ez"),
    "tm": ("Hx", "Hy", "Ez"),
    "tm_pml": ("Hx", "Hy", "Ez", "Phi"),
    "te": ("Ex", "Ey", "Hzx", "Hzy"),
    "3d": ("Hx", "Hy", "Hz", "Ex", "Ey", "Ez"),
}

# which components hold E (for penalty, projection and diagnostics)
E_SLICE = {"1d": slice(1, 2), "tm": slice(2, 3), "tm_pml": slice(2, 3), "te": slice(0, 2), "3d": slice(3, 6)}


@dataclass
class FieldState:
    """Evolved unknowns at time ``t``."""

    mode: str
    data: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if self.mode not in COMPONENTS:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.data.shape[0] != len(COMPONENTS[self.mode]):
            raise ValueError(f"mode {self.mode} needs {len(COMPONENTS[self.mode])} components")

    def __getitem__(self, name: str) -> np.ndarray:
        if name == "Hz" and self.mode == "te":
            return self.data[2] + self.data[3]
        return self.data[COMPONENTS[self.mode].index(name)]

    @property
    def names(self):
        return COMPONENTS[self.mode]

    @property
    def E(self) -> np.ndarray:
        return self.data[E_SLICE[self.mode]]

    @property
    def H(self) -> np.ndarray:
        """Magnetic components; the TE split pair is summed into ``H_z``."""
        if self.mode == "te":
            return (self.data[2] + self.data[3])[None]
        if self.mode == "1d":
            return self.data[0:1]
        return self.data[0:2] if self.mode in ("tm", "tm_pml") else self.data[0:3]


def _d(f, grid, axis):
    return spectral_derivative(f, grid, axis=axis, order=1)


def _penalty_term(E, t, penalty: Optional[PenaltyOperator], chi, eta):
    # eta^{-1} chi (E - g~); a missing operator means the non-active g~ = 0.
    if chi is None:
        return 0.0
    gt = 0.0 if penalty is None else penalty(E, t)
    return chi * (E - gt) / eta


# ---------------------------------------------------------------------------
# PML profiles
# ---------------------------------------------------------------------------


@dataclass
class PmlProfile:
    """Static absorption fields and an optional temporal ramp.

    ``ramp`` is ``None`` or ``("cubic", t_end)``; the profile is then scaled by
    ``min(t / t_end, 1)**3``.
    """

    sigma_x: np.ndarray
    sigma_y: np.ndarray
    sigma_max: tuple = (0.0, 0.0)
    width: tuple = (0.0, 0.0)
    ramp: Optional[tuple] = None

    def factor(self, t: float) -> float:
        if self.ramp is None:
            return 1.0
        kind, t_end = self.ramp
        if kind != "cubic":
            raise ValueError(f"unknown ramp {kind!r}")
        return min(max(t / t_end, 0.0), 1.0) ** 3

    def at(self, t: float):
        f = self.factor(t)
        return f * self.sigma_x, f * self.sigma_y


def _slab(coord, lo, D, width, smax, placement):
    # Distance-based linear ramp for one periodic slab at the seam x = lo (== lo + D).
    u = np.mod(coord - lo, D)
    if placement == "centered":
        dist = np.minimum(u, D - u)
        half = 0.5 * width
        return np.where(dist < half, smax * (1.0 - dist / half), 0.0)
    if placement == "flush":
        start = D - width
        return np.where(u >= start, smax * (u - start) / width, 0.0)
    raise ValueError("placement must be 'centered' or 'flush'")


def build_pml_profile(
    grid: Grid,
    axes=("x",),
    sigma_max=0.0,
    width=0.25,
    ramp=None,
    placement: str = "centered",
    chi: Optional[np.ndarray] = None,
    exclude_penalized: bool = False,
) -> PmlProfile:
    """Absorbing slabs at the periodic seam of each listed axis.

    ``sigma`` rises linearly from 0 at the slab edge to ``sigma_max`` at the
    seam. ``centered`` slabs straddle the seam; ``flush`` slabs end at it.
    With ``exclude_penalized`` the profile is zeroed wherever ``chi == 1``.
    Otherwise any overlap with ``chi`` raises ``ValueError``.
    """
    if grid.dim != 2:
        raise ValueError("PML profiles are defined for 2D grids")
    smax = np.broadcast_to(np.asarray(sigma_max, dtype=float), (2,))
    wid = np.broadcast_to(np.asarray(width, dtype=float), (2,))
    if np.any(smax < 0):
        raise ValueError("sigma_max must be nonnegative")
    X, Y = grid.mesh()
    sig = [np.zeros(grid.shape), np.zeros(grid.shape)]
    for name in axes:
        a = "xy".index(name)
        if not 0 < wid[a] < grid.D:
            raise ValueError("slab width must lie in (0, D)")
        coord = X if a == 0 else Y
        sig[a] = _slab(coord, grid.origin[a], grid.D, wid[a], smax[a], placement)
    if chi is not None:
        if exclude_penalized:
            sig = [s * (1.0 - chi) for s in sig]
        else:
            check_disjoint(chi, sig[0], sig[1])
    return PmlProfile(sig[0], sig[1], tuple(smax), tuple(wid), ramp)


def check_disjoint(chi, sigma_x, sigma_y) -> None:
    """Require ``max chi (sigma_x + sigma_y) == 0``."""
    overlap = float(np.max(chi * (sigma_x + sigma_y)))
    if overlap != 0.0:
        raise ValueError(f"penalty band and PML overlap (max chi*(sigma_x+sigma_y) = {overlap:g})")


# ---------------------------------------------------------------------------
# Right-hand sides
# ---------------------------------------------------------------------------


def rhs_1d(u, t, grid, penalty=None, chi=None, eta=1.0):
    """``dH_y = D E_z``, ``dE_z = D H_y - chi (E_z - g~) / eta``."""
    Hy, Ez = u
    out = np.empty_like(u)
    out[0] = _d(Ez, grid, 0)
    out[1] = _d(Hy, grid, 0) - _penalty_term(Ez, t, penalty, chi, eta)
    return out


def rhs_tm(u, t, grid, penalty=None, chi=None, eta=1.0, forcing=None):
    """TM system with optional forcing ``F`` added to the ``E_z`` equation."""
    Hx, Hy, Ez = u
    out = np.empty_like(u)
    out[0] = -_d(Ez, grid, 1)
    out[1] = _d(Ez, grid, 0)
    out[2] = _d(Hy, grid, 0) - _d(Hx, grid, 1) - _penalty_term(Ez, t, penalty, chi, eta)
    if forcing is not None:
        out[2] += forcing(t)
    return out


def rhs_tm_pml_stretched(u, t, grid, pml: PmlProfile, penalty=None, chi=None, eta=1.0):
    """TM system with stretched-coordinate absorption and auxiliary ``Phi``."""
    Hx, Hy, Ez, Phi = u
    sx, sy = pml.at(t)
    out = np.empty_like(u)
    out[0] = -_d(Ez, grid, 1) - sy * Hx
    out[1] = _d(Ez, grid, 0) - sx * Hy
    out[2] = _d(Hy, grid, 0) - _d(Hx, grid, 1) - _penalty_term(Ez, t, penalty, chi, eta) - (sx + sy) * Ez + Phi
    out[3] = -sx * sy * Ez
    return out


def rhs_te_pml(u, t, grid, pml: Optional[PmlProfile] = None, penalty=None, chi=None, eta=1.0, forcing=None):
    """Split-field TE system; ``H_z = H_zx + H_zy``.

    Forcing (manufactured solutions) enters the ``H_zx`` equation so that the
    sum ``H_z`` receives it once.
    """
    Ex, Ey, Hzx, Hzy = u
    Hz = Hzx + Hzy
    out = np.empty_like(u)
    pen = _penalty_term(u[0:2], t, penalty, chi, eta)
    if np.isscalar(pen):
        pen = (pen, pen)
    out[0] = _d(Hz, grid, 1) - pen[0]
    out[1] = -_d(Hz, grid, 0) - pen[1]
    out[2] = -_d(Ey, grid, 0)
    out[3] = _d(Ex, grid, 1)
    if pml is not None:
        sx, sy = pml.at(t)
        out[0] -= sy * Ex
        out[1] -= sx * Ey
        out[2] -= sx * Hzx
        out[3] -= sy * Hzy
    if forcing is not None:
        out[2] += forcing(t)
    return out


def rhs_3d(u, t, grid, penalty=None, chi=None, eta=1.0):
    """``dH = -curl E``, ``dE = curl H - chi (E - g~) / eta``."""
    H, E = u[0:3], u[3:6]

    def curl(F):
        return np.stack(
            [
                _d(F[2], grid, 1) - _d(F[1], grid, 2),
                _d(F[0], grid, 2) - _d(F[2], grid, 0),
                _d(F[1], grid, 0) - _d(F[0], grid, 1),
            ]
        )

    out = np.empty_like(u)
    out[0:3] = -curl(E)
    out[3:6] = curl(H) - _penalty_term(E, t, penalty, chi, eta)
    return out


# ---------------------------------------------------------------------------
# Problem container
# ---------------------------------------------------------------------------


@dataclass
class Problem:
    """Everything the integrator needs to evaluate ``du/dt`` for one mode.

    Parameters
    ----------
    mode : str
        One of ``COMPONENTS``.
    grid : Grid
    eta : float
        Penalty time scale (ignored when ``chi`` is None).
    chi : ndarray or None
        Penalty mask; None disables penalization.
    penalty : PenaltyOperator or None
        Active extension; None with a mask gives the non-active ``g~ = 0``.
    forcing : callable or None
        ``forcing(t)`` returning a grid field.
    pml : PmlProfile or None
    physical : ndarray of bool or None
        Physical-region mask used for energy diagnostics.
    project : bool or None
        Divergence projection after each step; defaults to on for TE and 3D.
    """

    mode: str
    grid: Grid
    eta: float = 1.0
    chi: Optional[np.ndarray] = None
    penalty: Optional[PenaltyOperator] = None
    forcing: Optional[Callable] = None
    pml: Optional[PmlProfile] = None
    physical: Optional[np.ndarray] = None
    project: Optional[bool] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in COMPONENTS:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.project is None:
            self.project = self.mode in ("te", "3d")
        if self.mode == "tm_pml" and self.pml is None:
            raise ValueError("tm_pml mode needs a PML profile")
        if self.pml is not None and self.chi is not None:
            check_disjoint(self.chi, self.pml.sigma_x, self.pml.sigma_y)
        if self.chi is not None and not self.eta > 0:
            raise ValueError("eta must be positive")

    @property
    def ncomp(self) -> int:
        return len(COMPONENTS[self.mode])

    @property
    def active(self) -> bool:
        return self.penalty is not None

    def zeros(self) -> np.ndarray:
        return np.zeros((self.ncomp,) + self.grid.shape)

    def rhs(self, t: float, u: np.ndarray) -> np.ndarray:
        g, kw = self.grid, dict(penalty=self.penalty, chi=self.chi, eta=self.eta)
        if self.mode == "1d":
            return rhs_1d(u, t, g, **kw)
        if self.mode == "tm":
            return rhs_tm(u, t, g, forcing=self.forcing, **kw)
        if self.mode == "tm_pml":
            return rhs_tm_pml_stretched(u, t, g, self.pml, **kw)
        if self.mode == "te":
            return rhs_te_pml(u, t, g, pml=self.pml, forcing=self.forcing, **kw)
        return rhs_3d(u, t, g, **kw)

    def homogeneous(self) -> "Problem":
        """Copy with zero boundary data and no forcing (the linear part)."""
        pen = None
        if self.penalty is not None:
            p = self.penalty
            pen = PenaltyOperator(p.grid, p.rays, p.cfg, p.mode, None)
        return Problem(self.mode, self.grid, self.eta, self.chi, pen, None, self.pml, self.physical, self.project, dict(self.meta))
