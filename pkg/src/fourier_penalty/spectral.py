"""
Periodic grid bookkeeping and Fourier pseudospectral operators.

Fields live in physical space as real numpy arrays of shape ``grid.shape``
(axis 0 is x, axis 1 is y, axis 2 is z). Every operator transforms on demand;
nothing is kept in spectral space between calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.fft as sfft
import scipy.sparse as sp


@dataclass(frozen=True)
class Grid:
    """Equispaced periodic grid on ``origin + [0, D)^dim``.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1, 2 or 3.
    N : int
        Points per axis (even).
    D : float
        Side length of the periodic box.
    origin : sequence of float, optional
        Lower corner of the box; defaults to the zero vector.
    """

    dim: int
    N: int
    D: float
    origin: tuple = None

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.N <= 0 or self.N % 2:
            raise ValueError(f"N must be a positive even integer, got {self.N}")
        if not self.D > 0:
            raise ValueError(f"D must be positive, got {self.D}")
        origin = (0.0,) * self.dim if self.origin is None else tuple(float(o) for o in np.atleast_1d(self.origin))
        if len(origin) != self.dim:
            raise ValueError("origin must have one entry per axis")
        object.__setattr__(self, "origin", origin)

    @property
    def dx(self) -> float:
        return self.D / self.N

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.dim

    @property
    def size(self) -> int:
        return self.N**self.dim

    def axis(self, i: int = 0) -> np.ndarray:
        """Node coordinates along axis ``i``."""
        return self.origin[i] + self.dx * np.arange(self.N)

    def mesh(self) -> list:
        return np.meshgrid(*[self.axis(i) for i in range(self.dim)], indexing="ij")

    def points(self) -> np.ndarray:
        """All nodes as an ``(N**dim, dim)`` array in row-major order."""
        return np.stack([m.ravel() for m in self.mesh()], axis=-1)

    @cached_property
    def k(self) -> np.ndarray:
        return wavenumbers(self.N, self.D)

    def wrap(self, pts: np.ndarray) -> np.ndarray:
        """Map coordinates back into the fundamental box."""
        o = np.asarray(self.origin)
        return o + np.mod(np.asarray(pts, dtype=float) - o, self.D)


def wavenumbers(N: int, D: float) -> np.ndarray:
    """Wavenumbers ``k_l`` in FFT index order, with ``k_{N/2} = +pi N / D``."""
    if N <= 0 or N % 2:
        raise ValueError(f"N must be a positive even integer, got {N}")
    if not D > 0:
        raise ValueError(f"D must be positive, got {D}")
    l = np.arange(N)
    l = np.where(l <= N // 2, l, l - N)
    return 2.0 * np.pi * l / D


def _rfft_multiplier(grid: Grid, order: int, c_f) -> np.ndarray:
    # Half-spectrum multiplier for an rfft along one axis.
    N = grid.N
    k = 2.0 * np.pi * np.arange(N // 2 + 1) / grid.D
    mult = (1j * k) ** order
    # Nyquist dropped for every order: keeps output real and makes D1(D1 f) == D2 f.
    mult[-1] = 0.0
    if c_f is not None:
        # filter measured in mode index l = k D / (2 pi): same strength for any box size
        l = np.arange(N // 2 + 1)
        mult = mult * np.exp(-c_f * l**2 / N**2)
    return mult


def spectral_derivative(f: np.ndarray, grid: Grid, axis: int = 0, order: int = 1, c_f=None) -> np.ndarray:
    """Pseudospectral derivative of ``f`` along ``axis``.

    Applies ``exp(-c_f l^2 / N^2) (ik)^order`` to the transform along the axis,
    with ``l`` the integer mode index (``l = k`` when ``D = 2 pi``). The filter
    is omitted when ``c_f`` is None. Works on stacked fields too: any
    leading dimensions beyond ``grid.dim`` are treated as a batch.
    """
    f = np.asarray(f, dtype=float)
    if f.shape[f.ndim - grid.dim:] != grid.shape:
        raise ValueError(f"field shape {f.shape} does not match grid {grid.shape}")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if c_f is not None and c_f < 0:
        raise ValueError("c_f must be nonnegative")
    ax = f.ndim - grid.dim + axis
    mult = _rfft_multiplier(grid, order, c_f)
    bshape = [1] * f.ndim
    bshape[ax] = mult.size
    fh = sfft.rfft(f, axis=ax)
    fh *= mult.reshape(bshape)
    return sfft.irfft(fh, n=grid.N, axis=ax)


def divergence(E: np.ndarray, grid: Grid) -> np.ndarray:
    return sum(spectral_derivative(E[i], grid, axis=i) for i in range(grid.dim))


def _rfftn_k(grid: Grid) -> list:
    # Per-axis derivative wavenumbers on the rfftn half-spectrum, Nyquist zeroed.
    ks = []
    for i in range(grid.dim):
        if i == grid.dim - 1:
            k = 2.0 * np.pi * np.arange(grid.N // 2 + 1) / grid.D
            k[-1] = 0.0
        else:
            k = wavenumbers(grid.N, grid.D)
            k[grid.N // 2] = 0.0
        shape = [1] * grid.dim
        shape[i] = k.size
        ks.append(k.reshape(shape))
    return ks


def project_divergence_free(E: np.ndarray, chi: np.ndarray, grid: Grid) -> np.ndarray:
    """Remove the gradient part of ``E`` sourced by its divergence off the mask.

    Solves ``lap p = div(E) (1 - chi)`` spectrally (zero-mean ``p``) and
    returns ``E - grad p``. With ``chi == 0`` this is the discrete Helmholtz
    projection onto divergence-free fields.
    """
    E = np.asarray(E, dtype=float)
    if grid.dim < 2:
        raise ValueError("divergence projection needs dim >= 2")
    if E.shape != (grid.dim,) + grid.shape:
        raise ValueError("E must have shape (dim, *grid.shape)")
    div = divergence(E, grid)
    src = sfft.rfftn(div * (1.0 - chi), axes=range(grid.dim))
    ks = _rfftn_k(grid)
    k2 = sum(k**2 for k in ks)
    with np.errstate(divide="ignore", invalid="ignore"):
        ph = np.where(k2 > 0, -src / np.where(k2 > 0, k2, 1.0), 0.0)
    out = np.empty_like(E)
    for i in range(grid.dim):
        gi = sfft.irfftn(1j * ks[i] * ph, s=grid.shape, axes=range(grid.dim))
        out[i] = E[i] - gi
    return out


def _lagrange_weights(t: np.ndarray) -> np.ndarray:
    # 4-point cubic Lagrange weights for nodes -1, 0, 1, 2 at offset t in [0, 1).
    return np.stack(
        [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ],
        axis=-1,
    )


def interpolation_matrix(grid: Grid, points: np.ndarray) -> sp.csr_matrix:
    """Sparse ``(npts, N**dim)`` matrix of tensor-product cubic interpolation.

    Row ``q`` holds the ``4**dim`` Lagrange weights of the stencil around
    ``points[q]``; indices wrap periodically.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != grid.dim:
        pts = pts.reshape(-1, grid.dim)
    npts = pts.shape[0]
    N = grid.N
    idx = []
    wts = []
    for a in range(grid.dim):
        u = (pts[:, a] - grid.origin[a]) / grid.dx
        i0 = np.floor(u)
        t = u - i0
        i0 = i0.astype(np.int64)
        idx.append(np.mod(i0[:, None] + np.arange(-1, 3)[None, :], N))
        wts.append(_lagrange_weights(t))
    cols = np.zeros((npts, 1), dtype=np.int64)
    vals = np.ones((npts, 1))
    for a in range(grid.dim):
        cols = (cols[:, :, None] * N + idx[a][:, None, :]).reshape(npts, -1)
        vals = (vals[:, :, None] * wts[a][:, None, :]).reshape(npts, -1)
    stencil = 4**grid.dim
    indptr = np.arange(0, npts * stencil + 1, stencil)
    M = sp.csr_matrix((vals.ravel(), cols.ravel(), indptr), shape=(npts, grid.size))
    if N < 4:
        # stencil wraps onto itself
        M.sum_duplicates()
    return M


def interpolate(f: np.ndarray, grid: Grid, points: Sequence) -> np.ndarray:
    """Cubic (1D), bicubic (2D) or tricubic (3D) interpolation of ``f`` at ``points``."""
    M = interpolation_matrix(grid, points)
    f = np.asarray(f, dtype=float)
    if f.shape == grid.shape:
        return M @ f.ravel()
    return (M @ f.reshape(-1, grid.size).T).T
