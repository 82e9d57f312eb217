"""
Level-set geometries, closest-point projection and boundary-ray tables.

Sign convention everywhere: the level set is positive in the physical region
and negative inside the conductor. Normals are ``grad(psi) / |grad(psi)|`` and
so point into the physical region; a grid point is recovered from its ray as
``x = y + s * n`` with ``s`` the signed distance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spectral import Grid, interpolation_matrix

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
MAX_HALVINGS = 20
# slack on band/mask comparisons so that s == h on a node is counted inside
BAND_EPS = 1e-9


class NewtonFailure(RuntimeError):
    """Closest-point iteration did not converge for some points."""

    def __init__(self, points, indices=None):
        self.points = np.atleast_2d(points)
        self.indices = None if indices is None else np.asarray(indices)
        where = "" if indices is None else f" at grid indices {list(self.indices[:10])}"
        super().__init__(
            f"closest-point projection failed for {len(self.points)} point(s){where}; "
            "band too wide or curvature too large"
        )


@dataclass
class LevelSetGeometry:
    """A boundary described as the zero set of ``psi``.

    ``psi``, ``grad`` and ``hess`` take an ``(n, dim)`` array of points and
    return ``(n,)``, ``(n, dim)`` and ``(n, dim, dim)`` arrays.
    """

    dim: int
    psi: Callable
    grad: Callable
    hess: Callable
    is_signed_distance: bool
    name: str = "levelset"

    def closest_points(self, x: np.ndarray, tol=NEWTON_TOL, max_iter=NEWTON_MAX_ITER, y0=None):
        """Foot points, signed distances and normals for a batch of points.

        Returns ``(y, s, n, ok)``; ``ok`` flags converged points. ``y0`` is an
        optional starting guess for the foot points.
        """
        return _newton_batch(self, x, tol, max_iter, y0)

    def coarse_distance(self, x: np.ndarray) -> np.ndarray:
        """Cheap first-order estimate of |distance| used to discard far points."""
        g = np.linalg.norm(self.grad(x), axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.abs(self.psi(x)) / g
        return np.where(np.isfinite(d), d, np.inf)


# ---------------------------------------------------------------------------
# Built-in shapes
# ---------------------------------------------------------------------------


def _radial(center, a, sign):
    c = np.asarray(center, dtype=float)
    dim = c.size

    def psi(p):
        return sign * (np.linalg.norm(p - c, axis=-1) - a)

    def grad(p):
        d = p - c
        r = np.linalg.norm(d, axis=-1)[:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            return sign * d / r

    def hess(p):
        d = p - c
        r = np.linalg.norm(d, axis=-1)[:, None, None]
        rhat = d[:, :, None] / r
        eye = np.eye(dim)[None]
        with np.errstate(invalid="ignore", divide="ignore"):
            return sign * (eye - rhat * np.swapaxes(rhat, 1, 2)) / r

    return dim, psi, grad, hess


def halfspace(x0: float = 0.0, dim: int = 1) -> LevelSetGeometry:
    """Conductor on ``x < x0`` (first coordinate)."""
    e = np.zeros(dim)
    e[0] = 1.0
    return LevelSetGeometry(
        dim,
        psi=lambda p: p[:, 0] - x0,
        grad=lambda p: np.broadcast_to(e, p.shape).copy(),
        hess=lambda p: np.zeros(p.shape + (dim,)),
        is_signed_distance=True,
        name="halfspace",
    )


def circle_hole(center=(np.pi, np.pi), a: float = 2.0) -> LevelSetGeometry:
    """Disk conductor of radius ``a``; physical region outside."""
    if a <= 0:
        raise ValueError("radius must be positive")
    dim, psi, grad, hess = _radial(center, a, 1.0)
    return LevelSetGeometry(dim, psi, grad, hess, True, "circle_hole")


def circular_cavity(center=(0.0, 0.0), radius: float = 1.0) -> LevelSetGeometry:
    """Physical disk of the given radius surrounded by conductor."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    dim, psi, grad, hess = _radial(center, radius, -1.0)
    return LevelSetGeometry(dim, psi, grad, hess, True, "circular_cavity")


def sphere_hole(center=(np.pi, np.pi, np.pi), a: float = 2.0) -> LevelSetGeometry:
    if a <= 0:
        raise ValueError("radius must be positive")
    if len(center) != 3:
        raise ValueError("sphere center must have three coordinates")
    dim, psi, grad, hess = _radial(center, a, 1.0)
    return LevelSetGeometry(dim, psi, grad, hess, True, "sphere_hole")


def trifolium(a: float = 3.0, b: float = 1.0, center=(0.0, 0.0)) -> LevelSetGeometry:
    """Windmill obstacle: ``(x^2+y^2)^2 - 4a y x^2 + a y (x^2+y^2) - b``.

    Not a signed distance; projections go through Newton.
    """
    if a <= 0 or b <= 0:
        raise ValueError("trifolium needs a > 0 and b > 0")
    c = np.asarray(center, dtype=float)

    def psi(p):
        x, y = (p - c).T
        r2 = x * x + y * y
        return r2 * r2 - 4 * a * y * x * x + a * y * r2 - b

    def grad(p):
        x, y = (p - c).T
        r2 = x * x + y * y
        return np.stack([4 * x * r2 - 6 * a * x * y, 4 * y * r2 - 3 * a * x * x + 3 * a * y * y], axis=-1)

    def hess(p):
        x, y = (p - c).T
        hxx = 12 * x * x + 4 * y * y - 6 * a * y
        hxy = 8 * x * y - 6 * a * x
        hyy = 4 * x * x + 12 * y * y + 6 * a * y
        return np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2)

    return LevelSetGeometry(2, psi, grad, hess, False, "trifolium")


def gyroid(a: float = 0.95, period: float = 1.0) -> LevelSetGeometry:
    """Gyroid ``a - sin(wx)cos(wy) - sin(wy)cos(wz) - sin(wz)cos(wx)``, ``w = 2 pi / period``."""
    if not -1.5 < a < 1.5:
        raise ValueError("gyroid offset must lie in (-1.5, 1.5) for a nonempty surface")
    w = 2 * np.pi / period

    def psi(p):
        sx, sy, sz = np.sin(w * p).T
        cx, cy, cz = np.cos(w * p).T
        return a - sx * cy - sy * cz - sz * cx

    def grad(p):
        sx, sy, sz = np.sin(w * p).T
        cx, cy, cz = np.cos(w * p).T
        return w * np.stack([-cx * cy + sz * sx, sx * sy - cy * cz, sy * sz - cz * cx], axis=-1)

    def hess(p):
        sx, sy, sz = np.sin(w * p).T
        cx, cy, cz = np.cos(w * p).T
        hxx = sx * cy + sz * cx
        hyy = sx * cy + sy * cz
        hzz = sy * cz + sz * cx
        hxy = cx * sy
        hxz = cz * sx
        hyz = cy * sz
        H = np.stack(
            [np.stack([hxx, hxy, hxz], -1), np.stack([hxy, hyy, hyz], -1), np.stack([hxz, hyz, hzz], -1)],
            -2,
        )
        return w * w * H

    return LevelSetGeometry(3, psi, grad, hess, False, "gyroid")


def make_shape(kind: str, **params) -> LevelSetGeometry:
    """Build one of the named geometries.

    ``kind`` is one of ``halfspace``, ``circle_hole``, ``circular_cavity``,
    ``sphere_hole``, ``trifolium``, ``gyroid``, ``waveguide``.
    """
    if kind == "waveguide":
        from .waveguide import build_waveguide

        return build_waveguide(**params)
    makers = {
        "halfspace": halfspace,
        "circle_hole": circle_hole,
        "circular_cavity": circular_cavity,
        "sphere_hole": sphere_hole,
        "trifolium": trifolium,
        "gyroid": gyroid,
    }
    if kind not in makers:
        raise ValueError(f"unknown shape {kind!r}")
    return makers[kind](**params)


# ---------------------------------------------------------------------------
# Closest-point projection
# ---------------------------------------------------------------------------


def _skew(v):
    z = np.zeros(v.shape[:-1])
    return np.stack(
        [np.stack([z, -v[..., 2], v[..., 1]], -1), np.stack([v[..., 2], z, -v[..., 0]], -1), np.stack([-v[..., 1], v[..., 0], z], -1)],
        -2,
    )


def _residual(geom, y, x):
    """Residual of [psi(y); (y - x) x grad psi(y)], scaled by |grad psi(y)|."""
    g = geom.grad(y)
    gn = np.linalg.norm(g, axis=-1)
    d = y - x
    if geom.dim == 1:
        f = geom.psi(y)[:, None]
    elif geom.dim == 2:
        f = np.stack([geom.psi(y), d[:, 0] * g[:, 1] - d[:, 1] * g[:, 0]], axis=-1)
    else:
        f = np.concatenate([geom.psi(y)[:, None], np.cross(d, g)], axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return f / gn[:, None], f, g


def _jacobian(geom, y, x, g):
    H = geom.hess(y)
    d = y - x
    if geom.dim == 1:
        return g[:, None, :]
    if geom.dim == 2:
        row = np.stack([g[:, 1], -g[:, 0]], -1) + d[:, 0, None] * H[:, 1, :] - d[:, 1, None] * H[:, 0, :]
        return np.stack([g, row], axis=1)
    cross = -_skew(g) + _skew(d) @ H
    return np.concatenate([g[:, None, :], cross], axis=1)


def _newton_batch(geom, x, tol, max_iter, y0=None):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = x.shape[0]
    if y0 is None:
        g0 = geom.grad(x)
        gg = np.sum(g0 * g0, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            y = x - (geom.psi(x) / gg)[:, None] * g0
        y = np.where(np.isfinite(y), y, x)
    else:
        y = np.array(y0, dtype=float).reshape(x.shape)
    ok = np.zeros(n, dtype=bool)
    dead = np.zeros(n, dtype=bool)
    fs, f, g = _residual(geom, y, x)
    res = np.max(np.abs(fs), axis=-1)
    res = np.where(np.isfinite(res), res, np.inf)
    ok = res <= tol
    for _ in range(max_iter):
        act = ~ok & ~dead
        if not act.any():
            break
        ia = np.flatnonzero(act)
        ya, xa = y[ia], x[ia]
        J = _jacobian(geom, ya, xa, g[ia])
        fa = f[ia]
        with np.errstate(invalid="ignore"):
            if geom.dim == 3:
                Jt = np.swapaxes(J, 1, 2)
                A = Jt @ J
                rhs = -(Jt @ fa[:, :, None])[:, :, 0]
            else:
                A = J
                rhs = -fa
            det_ok = np.isfinite(A).all(axis=(1, 2)) & (np.abs(np.linalg.det(A)) > 0)
        step = np.zeros_like(ya)
        if det_ok.any():
            step[det_ok] = np.linalg.solve(A[det_ok], rhs[det_ok][:, :, None])[:, :, 0]
        dead[ia[~det_ok]] = True
        # damping: halve until the scaled residual decreases
        alpha = np.ones(ia.size)
        cur = res[ia]
        todo = det_ok.copy()
        ynew = ya.copy()
        newres = cur.copy()
        for _h in range(MAX_HALVINGS + 1):
            if not todo.any():
                break
            it = np.flatnonzero(todo)
            trial = ya[it] + alpha[it, None] * step[it]
            fst, _, _ = _residual(geom, trial, xa[it])
            r = np.max(np.abs(fst), axis=-1)
            r = np.where(np.isfinite(r), r, np.inf)
            better = r < cur[it]
            acc = it[better]
            ynew[acc] = trial[better]
            newres[acc] = r[better]
            todo[acc] = False
            alpha[it[~better]] *= 0.5
        stalled = np.flatnonzero(todo)
        # no decrease after all halvings: either at the roundoff floor or stuck
        floor = cur[stalled] <= 1e3 * tol
        ok[ia[stalled[floor]]] = True
        dead[ia[stalled[~floor]]] = True
        y[ia] = ynew
        res[ia] = newres
        fs_a, f_a, g_a = _residual(geom, y[ia], xa)
        f[ia] = f_a
        g[ia] = g_a
        ok[ia] |= res[ia] <= tol
    gy = geom.grad(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        nrm = gy / np.linalg.norm(gy, axis=-1, keepdims=True)
    s = np.sign(geom.psi(x)) * np.linalg.norm(y - x, axis=-1)
    return y, s, nrm, ok


def newton_project(geom: LevelSetGeometry, x, tol: float = NEWTON_TOL, max_iter: int = NEWTON_MAX_ITER):
    """Project ``x`` onto the zero level set by damped Newton.

    Solves ``[psi(y); (y - x) x grad psi(y)] = 0``. Accepts one point or an
    ``(n, dim)`` batch and returns ``(y, s, n)`` of matching shape; raises
    :class:`NewtonFailure` if any point does not converge.
    """
    xa = np.asarray(x, dtype=float)
    single = xa.ndim == 1
    y, s, nrm, ok = _newton_batch(geom, xa.reshape(-1, geom.dim), tol, max_iter)
    if not ok.all():
        raise NewtonFailure(xa.reshape(-1, geom.dim)[~ok])
    if single:
        return y[0], float(s[0]), nrm[0]
    return y, s, nrm


# ---------------------------------------------------------------------------
# Ray tables and masks
# ---------------------------------------------------------------------------


@dataclass
class RayTable:
    """Local coordinates ``x_j = y_j + s_j n_j`` for grid points in the band.

    ``index`` holds flat (row-major) grid indices.
    """

    grid: Grid
    index: np.ndarray
    x: np.ndarray
    y: np.ndarray
    n: np.ndarray
    s: np.ndarray
    h: float
    L: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self):
        return self.index.size

    @property
    def penalized(self) -> np.ndarray:
        """Boolean selector of rays with ``s <= h`` (all of them by construction)."""
        return self.s <= self.h + BAND_EPS * self.grid.dx

    def interp(self, where: str):
        """Cached interpolation matrix at the foot points (``"y"``) or at ``y + h n`` (``"h"``)."""
        if where not in self._cache:
            if where == "y":
                pts = self.y
            elif where == "h":
                pts = self.y + self.h * self.n
            else:
                raise ValueError(where)
            self._cache[where] = interpolation_matrix(self.grid, self.grid.wrap(pts))
        return self._cache[where]

    def to_csv(self, path) -> None:
        d = self.grid.dim
        ax = "xyz"[:d]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j"] + [f"x_{a}" for a in ax] + [f"y_{a}" for a in ax] + ["s"] + [f"n_{a}" for a in ax])
            for row in zip(self.index, self.x, self.y, self.s, self.n):
                w.writerow([int(row[0]), *map(repr, row[1]), *map(repr, row[2]), repr(float(row[3])), *map(repr, row[4])])


def _band(geom, grid: Grid, lo: float, hi: float):
    """Project every grid point whose signed distance lies in ``[lo, hi]``.

    Returns ``(index, x, y, s, n)`` and the sign of psi over the whole grid.
    """
    pts = grid.points()
    width = max(abs(lo), abs(hi))
    eps = BAND_EPS * grid.dx
    if hasattr(geom, "band_projection"):
        return geom.band_projection(grid, lo, hi)
    psi = geom.psi(pts)
    sign = np.where(psi > 0, 1.0, -1.0)
    if geom.is_signed_distance:
        cand = np.flatnonzero((psi >= lo - eps) & (psi <= hi + eps))
    else:
        gmax = np.nanmax(np.linalg.norm(geom.grad(pts), axis=-1))
        kappa = 4.0 * gmax
        cand = np.flatnonzero(np.abs(psi) <= kappa * width)
    x = pts[cand]
    y, s, n, ok = geom.closest_points(x)
    if geom.is_signed_distance:
        # exact distance is known; Newton only supplies the foot point
        s = psi[cand]
    if not ok.all():
        ok = _retry_failures(geom, grid, x, y, s, n, ok, width, cand)
        cand, x, y, s, n = cand[ok], x[ok], y[ok], s[ok], n[ok]
    sel = (s >= lo - eps) & (s <= hi + eps)
    return (cand[sel], x[sel], y[sel], s[sel], n[sel]), sign


def _retry_failures(geom, grid, x, y, s, n, ok, width, cand):
    """Second pass for points where Newton stalled.

    Converged foot points form a cloud on the surface with spacing of order
    dx. A stalled point farther than ``width + 2 dx`` from every cloud point
    is outside the band and dropped. The rest restart from the nearest cloud
    point; a second failure is an error. Updates ``y, s, n`` in place.
    """
    from scipy.spatial import cKDTree

    bad = np.flatnonzero(~ok)
    if not ok.any():
        raise NewtonFailure(x[bad], cand[bad])
    tree = cKDTree(y[ok])
    dist, nearest = tree.query(x[bad])
    near = dist <= width + 2.0 * grid.dx
    ok = ok.copy()
    if near.any():
        ib = bad[near]
        y0 = y[ok][nearest[near]]
        y2, s2, n2, ok2 = geom.closest_points(x[ib], y0=y0)
        if not ok2.all():
            raise NewtonFailure(x[ib][~ok2], cand[ib][~ok2])
        y[ib], s[ib], n[ib] = y2, s2, n2
        ok[ib] = True
    return ok


def build_ray_table(geom, grid: Grid, h: float, L: float) -> RayTable:
    """Rays for every grid point with signed distance in ``[-L, h]``."""
    if h <= 0 or L <= 0:
        raise ValueError("h and L must be positive")
    (idx, x, y, s, n), _ = _band(geom, grid, -L, h)
    return RayTable(grid, idx, x, y, n, s, h, L)


def mask_chi_h(geom, grid: Grid, h: float) -> np.ndarray:
    """Indicator of points within distance ``h`` of the conductor (or inside it)."""
    if h < 0:
        raise ValueError("h must be nonnegative")
    (idx, _, _, s, _), sign = _band(geom, grid, 0.0, h)
    chi = (sign < 0).astype(float)
    chi[idx] = 1.0
    return chi.reshape(grid.shape)


def physical_mask(geom, grid: Grid) -> np.ndarray:
    """Boolean mask of grid points in the physical region (psi > 0)."""
    if hasattr(geom, "band_projection"):
        _, sign = geom.band_projection(grid, 0.0, 0.0)
        return (sign > 0).reshape(grid.shape)
    return (geom.psi(grid.points()) > 0).reshape(grid.shape)
