"""
Classical RK4 integration, time-step selection and run diagnostics.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .equations import E_SLICE, Problem
from .spectral import divergence, project_divergence_free

RK4_IMAG_LIMIT = 2.83


def max_stable_dt(dim: int, D: float, N: int) -> float:
    """Largest stable RK4 step for the unpenalized Fourier scheme, ``2.83 / (pi sqrt(d)) D / N``."""
    if dim not in (1, 2, 3):
        raise ValueError("dim must be 1, 2 or 3")
    return RK4_IMAG_LIMIT / (math.pi * math.sqrt(dim)) * D / N


def rk4_amplification(z) -> np.ndarray:
    """``|1 + z + z^2/2 + z^3/6 + z^4/24|^2``; equals ``1 - r^6/72 + r^8/576`` at ``z = i r``."""
    z = np.asarray(z, dtype=complex)
    R = 1 + z * (1 + z / 2 * (1 + z / 3 * (1 + z / 4)))
    return np.abs(R) ** 2


@dataclass
class RunConfig:
    """Time-stepping parameters.

    Exactly one of ``dt`` and ``dt_coeff`` is used; ``dt_coeff`` gives
    ``dt = dt_coeff * dx``. The step is shortened so an integer number of
    steps lands on ``T``.
    """

    T: float
    dt: Optional[float] = None
    dt_coeff: Optional[float] = None
    projection: Optional[bool] = None
    snapshot_every: int = 0
    check_stability: bool = False

    def resolve(self, dx: float, dim: int = 1, D: float = None, N: int = None):
        """Return ``(nsteps, dt)`` with ``nsteps * dt == T``."""
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if self.dt is not None:
            dt = float(self.dt)
        elif self.dt_coeff is not None:
            dt = float(self.dt_coeff) * dx
        else:
            raise ValueError("set dt or dt_coeff")
        if not dt > 0:
            raise ValueError("dt must be positive")
        if self.check_stability and D is not None and dt >= max_stable_dt(dim, D, N):
            raise ValueError(f"dt = {dt:g} exceeds the RK4 bound {max_stable_dt(dim, D, N):g}")
        if self.T == 0:
            return 0, dt
        n = max(1, math.ceil(self.T / dt - 1e-12))
        return n, self.T / n


@dataclass
class Trajectory:
    """Final state plus per-step diagnostics and optional snapshots."""

    u: np.ndarray
    t: float
    dt: float
    steps: int
    diagnostics: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)

    def write_diagnostics(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "t", "energy_physical", "energy_total", "max_div_E"])
            for row in self.diagnostics:
                w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])


class NonFiniteState(FloatingPointError):
    def __init__(self, step: int):
        self.step = step
        super().__init__(f"non-finite values in the state at step {step}")


def energy(problem: Problem, u: np.ndarray, region: Optional[np.ndarray] = None) -> float:
    """``(1/2) sum (|E|^2 + |H|^2) dx^d`` over ``region`` (all points when None).

    The TE split pair enters through ``H_z = H_zx + H_zy``; ``Phi`` is excluded.
    """
    mode = problem.mode
    if mode == "te":
        parts = [u[0], u[1], u[2] + u[3]]
    elif mode == "tm_pml":
        parts = [u[0], u[1], u[2]]
    else:
        parts = list(u)
    dens = sum(p * p for p in parts)
    if region is not None:
        dens = dens[region]
    # sorted summation order keeps the reduction deterministic
    return 0.5 * float(np.sum(np.ravel(dens), dtype=np.float64)) * problem.grid.dx**problem.grid.dim


def masked_divergence(problem: Problem, u: np.ndarray) -> float:
    """Max of ``|div E| (1 - chi)`` for vector modes; 0 otherwise."""
    if problem.mode not in ("te", "3d"):
        return 0.0
    div = divergence(u[E_SLICE[problem.mode]], problem.grid)
    if problem.chi is not None:
        div = div * (1.0 - problem.chi)
    return float(np.max(np.abs(div)))


def _project(problem: Problem, u: np.ndarray) -> np.ndarray:
    sl = E_SLICE[problem.mode]
    chi = problem.chi if problem.chi is not None else 0.0
    u[sl] = project_divergence_free(u[sl], chi, problem.grid)
    return u


def rk4_step(problem: Problem, t: float, u: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step; the active penalty is rebuilt inside each stage."""
    f = problem.rhs
    k1 = f(t, u)
    k2 = f(t + 0.5 * dt, u + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, u + 0.5 * dt * k2)
    k4 = f(t + dt, u + dt * k3)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve(problem: Problem, u0: np.ndarray, run: RunConfig, t0: float = 0.0, diagnostics: bool = True) -> Trajectory:
    """Integrate ``du/dt = problem.rhs(t, u)`` from ``t0`` to ``t0 + run.T``."""
    g = problem.grid
    nsteps, dt = run.resolve(g.dx, g.dim, g.D, g.N)
    project = problem.project if run.projection is None else run.projection
    u = np.array(u0, dtype=float, copy=True)
    if u.shape != (problem.ncomp,) + g.shape:
        raise ValueError(f"initial state has shape {u.shape}, expected {(problem.ncomp,) + g.shape}")
    traj = Trajectory(u, t0, dt, nsteps)
    phys = problem.physical

    def record(step, t, u):
        if diagnostics:
            traj.diagnostics.append(
                (step, t, energy(problem, u, phys), energy(problem, u), masked_divergence(problem, u))
            )

    record(0, t0, u)
    if run.snapshot_every:
        traj.snapshots.append((t0, u.copy()))
    t = t0
    for step in range(1, nsteps + 1):
        u = rk4_step(problem, t, u, dt)
        if project:
            u = _project(problem, u)
        t = t0 + step * dt
        if not np.all(np.isfinite(u)):
            raise NonFiniteState(step)
        record(step, t, u)
        if run.snapshot_every and step % run.snapshot_every == 0:
            traj.snapshots.append((t, u.copy()))
    traj.u, traj.t = u, t
    return traj
