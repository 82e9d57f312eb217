"""
Named test cases, convergence and dispersion drivers, and CSV output.

Every case is described by a :class:`CaseSpec` whose defaults are the
reference parameter set for that test. ``h`` is given in units of ``dx`` and ``eta`` in
units of ``dt`` so that a case definition scales with the grid.
"""

from __future__ import annotations

import csv
import dataclasses
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import oracles
from .equations import E_SLICE, Problem, build_pml_profile
from .geometry import build_ray_table, make_shape, mask_chi_h, physical_mask
from .penalty import PenaltyConfig, PenaltyOperator
from .spectral import Grid
from .timestepping import NonFiniteState, RunConfig, Trajectory, evolve

TWO_PI = 2.0 * np.pi


@dataclass
class CaseSpec:
    """Full parameter set of one test case.

    Attributes
    ----------
    case_id : str
    mode : str
        Equation set, see ``equations.COMPONENTS``.
    D, origin : box size and lower corner.
    N : default grid size.
    shape, shape_params : geometry passed to ``make_shape``.
    m, L, c_f : penalty extension parameters.
    h_dx, eta_dt : ``h = h_dx * dx`` and ``eta = eta_dt * dt``.
    dt_coeff : ``dt = dt_coeff * dx``.
    T : integration time; ``t0`` is the start time.
    active : False gives the non-active penalty ``g~ = 0``.
    pulse : initial pulse parameters for scattering cases.
    pml : keyword arguments for ``build_pml_profile`` (``sigma_max`` may be
        the string ``"N/2"``), or None.
    grids : default convergence grids.
    """

    case_id: str
    mode: str
    D: float
    origin: tuple
    N: int
    shape: str
    shape_params: dict
    m: int = 0
    L: float = 1.0
    c_f: Optional[float] = 16.0
    h_dx: float = 2.0
    eta_dt: float = 4.0
    dt_coeff: float = 0.4
    T: float = 1.0
    t0: float = 0.0
    active: bool = True
    pulse: dict = field(default_factory=dict)
    pml: Optional[dict] = None
    grids: tuple = ()
    description: str = ""

    @property
    def dim(self) -> int:
        return {"1d": 1, "tm": 2, "tm_pml": 2, "te": 2, "3d": 3}[self.mode]

    def replace(self, **kw) -> "CaseSpec":
        unknown = set(kw) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ValueError(f"unknown CaseSpec fields: {sorted(unknown)}")
        return dataclasses.replace(self, **kw)


def _registry() -> dict:
    cases = [
        CaseSpec(
            "gauss1d", "1d", D=16.0, origin=(-2.0,), N=2048, shape="halfspace", shape_params=dict(x0=0.0, dim=1),
            m=0, L=0.5, h_dx=1.0, eta_dt=5.0, dt_coeff=0.2, T=12.0,
            pulse=dict(E0=1.0, x0=7.0, sigma=1 / np.sqrt(2.0), omega0=10.0), grids=(256, 512, 1024, 2048),
            description="1D Gaussian packet reflecting off a PEC wall at x=0",
        ),
        CaseSpec(
            "pollution1d", "1d", D=16.0, origin=(-2.0,), N=512, shape="halfspace", shape_params=dict(x0=0.0, dim=1),
            m=1, L=1.0, h_dx=1.002, eta_dt=1.0, dt_coeff=0.5, T=15.0,
            pulse=dict(E0=1.0, x0=7.0, sigma=1 / np.sqrt(2.0), omega0=10.0),
            description="1D packet at fixed points per wavelength (dispersion study)",
        ),
        CaseSpec(
            "tm_circle", "tm", D=TWO_PI, origin=(0.0, 0.0), N=64, shape="circle_hole",
            shape_params=dict(center=(np.pi, np.pi), a=2.0), m=0, L=1.0, T=1.1 * np.pi, grids=(32, 64, 128, 256),
            description="Manufactured TM solution around a circular hole",
        ),
        CaseSpec(
            "te_circle", "te", D=TWO_PI, origin=(0.0, 0.0), N=64, shape="circle_hole",
            shape_params=dict(center=(np.pi, np.pi), a=2.0), m=0, L=1.0, T=1.1 * np.pi, grids=(32, 64, 128, 256),
            description="Manufactured TE solution around a circular hole",
        ),
        CaseSpec(
            "cavity", "tm", D=3.0, origin=(-1.5, -1.5), N=128, shape="circular_cavity",
            shape_params=dict(center=(0.0, 0.0), radius=1.0), m=1, L=0.45, T=0.3,
            pulse=dict(i=6, j=2), grids=(64, 128, 256, 512),
            description="TM Bessel eigenmode in a circular PEC cavity",
        ),
        CaseSpec(
            "cylinder_scatter", "te", D=2.5, origin=(-1.0, -1.0), N=128, shape="circle_hole",
            shape_params=dict(center=(0.0, 0.0), a=0.2), m=0, L=0.15, T=1.508,
            pulse=dict(x0=-0.6, sigma=0.125, sign=1.0),
            pml=dict(axes=("x", "y"), sigma_max="N/2", width=0.25), grids=(64, 128, 256, 512),
            description="TE pulse scattering off a small PEC cylinder with split-field PML",
        ),
        CaseSpec(
            "waveguide_tm", "tm", D=TWO_PI, origin=(0.0, 0.0), N=128, shape="waveguide",
            shape_params=dict(r0=1.0, l0=np.pi - 2.0, y_off=2.0, c=0.5), m=0, L=0.4, eta_dt=1.0,
            T=0.275 * np.pi, grids=(64, 128, 256),
            description="Manufactured TM solution inside a bent waveguide",
        ),
        CaseSpec(
            "waveguide_te_pulse", "te", D=TWO_PI, origin=(0.0, 0.0), N=256, shape="waveguide",
            shape_params=dict(r0=1.0, l0=np.pi - 2.0, y_off=2.0, c=0.5), m=0, L=0.4, eta_dt=1.0, T=10.0,
            pulse=dict(x0=0.5, sigma=0.25, sign=-1.0),
            pml=dict(axes=("x",), sigma_max="N/2", width=0.25, exclude_penalized=True),
            description="TE pulse travelling down the bent waveguide into a PML",
        ),
        CaseSpec(
            "windmill_tm_pml", "tm_pml", D=3 * np.pi, origin=(-1.5 * np.pi, -1.5 * np.pi), N=256, shape="trifolium",
            shape_params=dict(a=3.0, b=1.0), m=1, L=0.3, eta_dt=1.0, T=10.0,
            pulse=dict(x0=-4.0, sigma=0.25),
            pml=dict(axes=("x", "y"), sigma_max="N/2", width=1.0 / 3.0, ramp="cubic"),
            description="TM pulse scattering off a trifolium with stretched-coordinate PML",
        ),
        CaseSpec(
            "sphere3d", "3d", D=TWO_PI, origin=(0.0, 0.0, 0.0), N=32, shape="sphere_hole",
            shape_params=dict(center=(np.pi, np.pi, np.pi), a=2.0), m=0, L=1.0, T=3.0, t0=oracles.T0_3D,
            grids=(32, 64, 128),
            description="3D standing wave around a spherical hole",
        ),
        CaseSpec(
            "gyroid_demo", "3d", D=1.0, origin=(0.0, 0.0, 0.0), N=64, shape="gyroid", shape_params=dict(a=0.95),
            m=0, L=0.025, eta_dt=5.0, dt_coeff=0.35, T=1.0, pulse=dict(x0=0.5, sigma=0.05),
            description="3D pulse scattering off a gyroid (smoke test)",
        ),
    ]
    return {c.case_id: c for c in cases}


CASES = _registry()


def get_case(case_id: str, **overrides) -> CaseSpec:
    if case_id not in CASES:
        raise KeyError(f"unknown case {case_id!r}; known: {', '.join(CASES)}")
    spec = CASES[case_id]
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return spec.replace(**overrides) if overrides else spec


# ---------------------------------------------------------------------------
# Problem construction
# ---------------------------------------------------------------------------


def _pulse_profile(x, x0, sigma):
    return 2.0 / sigma**2 * (x - x0) * np.exp(-(((x - x0) / sigma) ** 2))


@dataclass
class CaseSetup:
    """A ready-to-run case at one resolution."""

    spec: CaseSpec
    grid: Grid
    problem: Problem
    u0: np.ndarray
    run: RunConfig
    exact: Optional[Callable]
    error_mask: np.ndarray
    geometry: object
    rays: object


def _boundary_data(spec: CaseSpec):
    if spec.case_id in ("tm_circle", "waveguide_tm"):
        return lambda p, t: np.sin(p[:, 0]) * np.cos(p[:, 1]) * np.cos(t)
    if spec.case_id == "te_circle":
        def g(p, t):
            Ex, Ey, _ = oracles.manufactured_te_exact(p[:, 0], p[:, 1], t)
            return np.stack([Ex, Ey], -1)
        return g
    if spec.case_id == "sphere3d":
        def g(p, t):
            E, _ = oracles.standing_wave_3d_exact(p.T, t)
            return E.T
        return g
    return None


def _exact(spec: CaseSpec, grid: Grid):
    """Callable ``t -> (E components, H components)`` on the grid, or None."""
    X = grid.mesh()
    if spec.case_id in ("gauss1d", "pollution1d"):
        p = oracles.PulseParams(**spec.pulse)

        def ex(t):
            H, E = oracles.gaussian_1d_exact(X[0], t, p)
            return E[None], H[None]
        return ex
    if spec.case_id in ("tm_circle", "waveguide_tm"):
        def ex(t):
            Hx, Hy, Ez = oracles.manufactured_tm_exact(X[0], X[1], t)
            return Ez[None], np.stack([Hx, Hy])
        return ex
    if spec.case_id == "te_circle":
        def ex(t):
            Ex, Ey, Hz = oracles.manufactured_te_exact(X[0], X[1], t)
            return np.stack([Ex, Ey]), Hz[None]
        return ex
    if spec.case_id == "cavity":
        i, j = spec.pulse.get("i", 6), spec.pulse.get("j", 2)
        alpha = oracles.bessel_root(i, j)
        c = spec.shape_params.get("center", (0.0, 0.0))

        def ex(t):
            Hx, Hy, Ez = oracles.cavity_mode_cartesian(i, alpha, X[0], X[1], t, center=c)
            return Ez[None], np.stack([Hx, Hy])
        return ex
    if spec.case_id == "sphere3d":
        def ex(t):
            E, H = oracles.standing_wave_3d_exact(np.stack(X), t)
            return E, H
        return ex
    return None


def _state_from(mode, E, H):
    if mode == "1d":
        return np.stack([H[0], E[0]])
    if mode == "tm":
        return np.stack([H[0], H[1], E[0]])
    if mode == "tm_pml":
        return np.stack([H[0], H[1], E[0], np.zeros_like(E[0])])
    if mode == "te":
        return np.stack([E[0], E[1], H[0], np.zeros_like(H[0])])
    return np.concatenate([H, E])


def split_state(mode, u):
    """``(E, H)`` component stacks of a state; TE returns ``H_z = H_zx + H_zy``."""
    E = u[E_SLICE[mode]]
    if mode == "1d":
        H = u[0:1]
    elif mode in ("tm", "tm_pml"):
        H = u[0:2]
    elif mode == "te":
        H = (u[2] + u[3])[None]
    else:
        H = u[0:3]
    return E, H


def setup_case(spec: CaseSpec, N: Optional[int] = None) -> CaseSetup:
    """Build geometry, rays, penalty, PML, initial data and run settings."""
    N = spec.N if N is None else int(N)
    grid = Grid(spec.dim, N, spec.D, spec.origin)
    dx = grid.dx
    dt = spec.dt_coeff * dx
    h = spec.h_dx * dx
    eta = spec.eta_dt * dt
    geom = make_shape(spec.shape, **spec.shape_params)
    rays = build_ray_table(geom, grid, h, spec.L)
    chi = mask_chi_h(geom, grid, h)
    phys = physical_mask(geom, grid)
    cfg = PenaltyConfig(eta=eta, h=h, L=spec.L, m=spec.m, c_f=spec.c_f)
    pmode = {"1d": "1d", "tm": "tm", "tm_pml": "tm", "te": "te", "3d": "3d"}[spec.mode]
    g = _boundary_data(spec)
    penalty = PenaltyOperator(grid, rays, cfg, pmode, g) if spec.active else None

    pml = None
    if spec.pml is not None:
        kw = dict(spec.pml)
        if kw.get("sigma_max") == "N/2":
            kw["sigma_max"] = N / 2.0
        ramp = kw.pop("ramp", None)
        if ramp == "cubic":
            kw["ramp"] = ("cubic", 0.5 * spec.T)
        pml = build_pml_profile(grid, chi=chi, **kw)

    forcing = None
    X = grid.mesh()
    if spec.case_id in ("tm_circle", "te_circle", "waveguide_tm"):
        base = np.sin(X[0]) * np.cos(X[1])
        forcing = lambda t, base=base: base * np.sin(t)

    exact = _exact(spec, grid)
    u0 = _initial_state(spec, grid, exact, chi, phys, penalty, X)
    problem = Problem(spec.mode, grid, eta=eta, chi=chi, penalty=penalty, forcing=forcing, pml=pml, physical=phys,
                      meta=dict(case=spec.case_id, N=N, m=spec.m, h=h, dt=dt))
    err_mask = phys & (chi == 0)
    if pml is not None:
        err_mask &= (pml.sigma_x == 0) & (pml.sigma_y == 0)
    run = RunConfig(T=spec.T, dt=dt)
    return CaseSetup(spec, grid, problem, u0, run, exact, err_mask, geom, rays)


def _initial_state(spec, grid, exact, chi, phys, penalty, X):
    mode = spec.mode
    if exact is not None:
        E, H = exact(spec.t0)
        if spec.case_id == "cavity":
            # smooth exact field is only physical inside the cavity; seed the
            # conductor with the extension the penalty will track
            Ez = E[0]
            if penalty is not None:
                Ez = np.where(chi == 1, penalty(Ez, spec.t0), Ez)
            else:
                Ez = np.where(chi == 1, 0.0, Ez)
            E = Ez[None]
        return _state_from(mode, E, H)
    p = spec.pulse
    x0, sigma = p["x0"], p["sigma"]
    prof = _pulse_profile(X[0], x0, sigma)
    live = (chi == 0).astype(float)
    if mode == "tm_pml":
        # right-moving TM pulse: E_z = f, H_y = -f
        return _state_from(mode, (prof * live)[None], np.stack([np.zeros(grid.shape), -prof * live]))
    if mode == "te":
        s = p.get("sign", 1.0)
        f = s * prof * live
        return _state_from(mode, np.stack([np.zeros(grid.shape), f]), f[None])
    if mode == "3d":
        f = prof * live
        z = np.zeros(grid.shape)
        return _state_from(mode, np.stack([z, f, z]), np.stack([z, z, f]))
    raise ValueError(f"no initial data for case {spec.case_id}")


# ---------------------------------------------------------------------------
# Running and error measurement
# ---------------------------------------------------------------------------


@dataclass
class CaseResult:
    case_id: str
    N: int
    m: int
    err_E: float
    err_H: float
    trajectory: Trajectory
    setup: CaseSetup

    @property
    def err_u(self) -> float:
        return max(self.err_E, self.err_H)


def measure_error(setup: CaseSetup, u: np.ndarray, t: float):
    """L-infinity errors of E and H over unpenalized physical points outside the PML."""
    if setup.exact is None:
        return float("nan"), float("nan")
    Ee, He = setup.exact(t)
    E, H = split_state(setup.spec.mode, u)
    msk = setup.error_mask
    eE = float(np.max(np.abs(E - Ee)[:, msk])) if msk.any() else 0.0
    eH = float(np.max(np.abs(H - He)[:, msk])) if msk.any() else 0.0
    return eE, eH


def run_case(spec: CaseSpec, N: Optional[int] = None, out_dir: Optional[str] = None, snapshot_every: int = 0,
             diagnostics: bool = True) -> CaseResult:
    """Run one case at one resolution and optionally write its CSV artifacts."""
    try:
        setup = setup_case(spec, N)
        run = dataclasses.replace(setup.run, snapshot_every=snapshot_every)
        traj = evolve(setup.problem, setup.u0, run, t0=spec.t0, diagnostics=diagnostics)
    except Exception as exc:
        raise RuntimeError(f"case {spec.case_id}: {exc}") from exc
    eE, eH = measure_error(setup, traj.u, traj.t)
    res = CaseResult(spec.case_id, setup.grid.N, spec.m, eE, eH, traj, setup)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        if diagnostics:
            traj.write_diagnostics(os.path.join(out_dir, "diagnostics.csv"))
        write_field_csv(os.path.join(out_dir, f"field_{traj.t:.6g}.csv"), setup, traj.u, traj.t)
        for t, u in traj.snapshots:
            write_field_csv(os.path.join(out_dir, f"field_{t:.6g}.csv"), setup, u, t)
        write_errors_csv(os.path.join(out_dir, "errors.csv"), [res])
    return res


def write_field_csv(path, setup: CaseSetup, u: np.ndarray, t: float) -> None:
    from .equations import COMPONENTS

    g = setup.grid
    names = COMPONENTS[setup.spec.mode]
    coords = "xyz"[: g.dim]
    with open(path, "w", newline="") as fh:
        fh.write(f"# case={setup.spec.case_id} dim={g.dim} N={g.N} D={g.D!r} origin={list(g.origin)} t={t!r}\n")
        w = csv.writer(fh)
        w.writerow(list(coords) + list(names))
        pts = g.points()
        data = u.reshape(len(names), -1)
        for q in range(g.size):
            w.writerow([f"{c:.12g}" for c in pts[q]] + [f"{v:.16g}" for v in data[:, q]])


# ---------------------------------------------------------------------------
# Convergence studies
# ---------------------------------------------------------------------------


def fit_rate(errors, Ns):
    """Least-squares slope of ``log(error)`` against ``log(1/N)``; returns ``(rate, rms residual)``."""
    e = np.asarray(errors, dtype=float)
    n = np.asarray(Ns, dtype=float)
    if e.size != n.size or e.size < 2:
        raise ValueError("need at least two (N, error) pairs")
    if np.any(~(e > 0)):
        raise ValueError("errors must be positive")
    xs = np.log(1.0 / n)
    ys = np.log(e)
    A = np.vstack([xs, np.ones_like(xs)]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


@dataclass
class ConvergenceReport:
    case_id: str
    m: int
    Ns: list
    err_E: list
    err_H: list
    rate_E: float
    rate_H: float
    rate_u: float
    residual_u: float
    monotone: bool

    @property
    def err_u(self):
        return [max(a, b) for a, b in zip(self.err_E, self.err_H)]

    def rows(self):
        for i, N in enumerate(self.Ns):
            yield N, self.err_E[i], self.err_H[i], self.err_u[i]


def _safe_rate(errs, Ns):
    if not np.all(np.isfinite(errs)):
        return float("nan"), float("nan")
    try:
        return fit_rate(errs, Ns)
    except ValueError:
        return float("nan"), float("nan")


def convergence_study(case, m: Optional[int] = None, Ns=None, out_dir=None, verbose=False, **overrides) -> ConvergenceReport:
    """Run a case over several grids and fit L-infinity rates.

    ``case`` is a case id or a :class:`CaseSpec`. ``cylinder_scatter`` has no
    exact solution and is measured against its finest run instead.
    """
    spec = get_case(case) if isinstance(case, str) else case
    if m is not None:
        overrides["m"] = m
    if overrides:
        spec = spec.replace(**{k: v for k, v in overrides.items() if v is not None})
    Ns = list(spec.grids if Ns is None else Ns)
    if len(Ns) < 3:
        raise ValueError("need at least three grids")
    if spec.case_id == "cylinder_scatter" or _exact(spec, Grid(spec.dim, 2, spec.D, spec.origin)) is None:
        eE, eH = _self_convergence(spec, Ns, verbose)
        Ns_fit = Ns[:-1]
    else:
        eE, eH = [], []
        for N in Ns:
            try:
                r = run_case(spec, N, diagnostics=False)
                eE.append(r.err_E)
                eH.append(r.err_H)
            except RuntimeError as exc:
                if not isinstance(exc.__cause__, NonFiniteState):
                    raise
                # a blow-up is a result, not a crash: record it and keep sweeping
                eE.append(float("inf"))
                eH.append(float("inf"))
            r_E, r_H = eE[-1], eH[-1]
            if verbose:
                print(f"  {spec.case_id} m={spec.m} N={N}: err_E={r_E:.3e} err_H={r_H:.3e}", flush=True)
        Ns_fit = Ns
    eu = [max(a, b) for a, b in zip(eE, eH)]
    rE, _ = _safe_rate(eE, Ns_fit)
    rH, _ = _safe_rate(eH, Ns_fit)
    ru, res = _safe_rate(eu, Ns_fit)
    mono = all(eu[i + 1] < eu[i] for i in range(len(eu) - 1))
    if not mono and verbose:
        print(f"  warning: non-monotone error sequence for {spec.case_id} m={spec.m}", flush=True)
    rep = ConvergenceReport(spec.case_id, spec.m, list(Ns_fit), eE, eH, rE, rH, ru, res, mono)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_report_csv(os.path.join(out_dir, "errors.csv"), rep)
    return rep


def _self_convergence(spec: CaseSpec, Ns, verbose=False):
    # errors of each coarse run against the finest run at the shared grid points
    Ns = sorted(Ns)
    runs = {N: run_case(spec, N, diagnostics=False) for N in Ns}
    fine = runs[Ns[-1]]
    eE, eH = [], []
    for N in Ns[:-1]:
        if Ns[-1] % N:
            raise ValueError("self-convergence grids must divide the finest grid")
        step = Ns[-1] // N
        sl = (slice(None),) + (slice(None, None, step),) * spec.dim
        r = runs[N]
        Ef, Hf = split_state(spec.mode, fine.trajectory.u[sl])
        Ec, Hc = split_state(spec.mode, r.trajectory.u)
        msk = r.setup.error_mask & fine.setup.error_mask[sl[1:]]
        eE.append(float(np.max(np.abs(Ec - Ef)[:, msk])))
        eH.append(float(np.max(np.abs(Hc - Hf)[:, msk])))
        if verbose:
            print(f"  {spec.case_id} m={spec.m} N={N}: err_E={eE[-1]:.3e} err_H={eH[-1]:.3e} (vs N={Ns[-1]})", flush=True)
    return eE, eH


def write_report_csv(path, rep: ConvergenceReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "Linf_E", "Linf_H", "Linf_u", "rate_E", "rate_H", "rate_u"])
        for N, a, b, c in rep.rows():
            w.writerow([N, repr(a), repr(b), repr(c), repr(rep.rate_E), repr(rep.rate_H), repr(rep.rate_u)])


def write_errors_csv(path, results) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "Linf_E", "Linf_H", "Linf_u", "rate"])
        for r in results:
            w.writerow([r.N, repr(r.err_E), repr(r.err_H), repr(r.err_u), ""])


# ---------------------------------------------------------------------------
# Dispersion (pollution) study with finite-difference comparators
# ---------------------------------------------------------------------------


def fd_derivative(f: np.ndarray, dx: float, order: int, axis: int = 0) -> np.ndarray:
    """Periodic centered first derivative of accuracy order 2 or 4."""
    if order == 2:
        return (np.roll(f, -1, axis) - np.roll(f, 1, axis)) / (2 * dx)
    if order == 4:
        return (
            -np.roll(f, -2, axis) + 8 * np.roll(f, -1, axis) - 8 * np.roll(f, 1, axis) + np.roll(f, 2, axis)
        ) / (12 * dx)
    raise ValueError("FD order must be 2 or 4")


def pollution_grid(omega0: float, ppwl: float, D: float = 16.0, multiple: int = 8) -> int:
    """Grid size giving about ``ppwl`` points per carrier wavelength, rounded to a multiple of 8.

    The multiple of 8 keeps ``x = 0`` on a node of the ``[-2, 14)`` box.
    """
    N = D * omega0 * ppwl / TWO_PI
    return max(multiple, int(round(N / multiple)) * multiple)


def run_pollution_point(omega0: float, ppwl: float, m: int, scheme: str = "spectral", spec: Optional[CaseSpec] = None,
                        fd_m: int = 0):
    """Error at final time for one carrier frequency; ``scheme`` is spectral, fd2 or fd4.

    FD comparators use the same penalty operator with ``fd_m`` matched
    derivatives; derivative matching on top of FD evolution is unstable.
    """
    spec = get_case("pollution1d") if spec is None else spec
    if scheme != "spectral":
        m = fd_m
    dt_coeff = 0.2 if m == 2 else 0.5
    pulse = dict(spec.pulse, omega0=float(omega0))
    s = spec.replace(m=m, dt_coeff=dt_coeff, pulse=pulse)
    N = pollution_grid(omega0, ppwl, s.D)
    setup = setup_case(s, N)
    if scheme != "spectral":
        order = {"fd2": 2, "fd4": 4}[scheme]
        _use_fd(setup, order)
    traj = evolve(setup.problem, setup.u0, setup.run, diagnostics=False)
    eE, eH = measure_error(setup, traj.u, traj.t)
    return N, max(eE, eH)


def _use_fd(setup: CaseSetup, order: int) -> None:
    # swap the evolution derivatives for the FD stencil; the penalty is left unchanged
    from . import equations as eq

    dx = setup.grid.dx
    prob = setup.problem
    pen = prob.penalty

    def rhs(t, u):
        Hy, Ez = u
        out = np.empty_like(u)
        out[0] = fd_derivative(Ez, dx, order)
        out[1] = fd_derivative(Hy, dx, order) - eq._penalty_term(Ez, t, pen, prob.chi, prob.eta)
        return out

    prob.rhs = rhs


def pollution_study(ppwl: float = 20, omegas=(10, 20, 40, 80), m: int = 1, schemes=("spectral", "fd2", "fd4"), verbose=False):
    """Table of ``(scheme, omega0, N, error)`` rows at fixed points per wavelength."""
    if ppwl < 8:
        raise ValueError("ppwl must be at least 8")
    rows = []
    for scheme in schemes:
        for w in omegas:
            N, err = run_pollution_point(w, ppwl, m, scheme)
            rows.append((scheme, float(w), N, err))
            if verbose:
                print(f"  {scheme:8s} omega0={w:6g} N={N:5d} err={err:.3e}", flush=True)
    return rows
