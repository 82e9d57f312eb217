"""
Dense assembly of the semi-discrete evolution operator and RK4 containment checks.

The operator is obtained by pushing unit vectors through the production
right-hand side with homogeneous boundary data, so the matrix analyzed is the
one the time stepper actually applies.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .equations import COMPONENTS, Problem
from .timestepping import rk4_amplification

WEAK_GROWTH = 1e-3


class LinearityError(RuntimeError):
    pass


@dataclass
class DenseOperator:
    """Matrix ``A`` with ``d(vec u)/dt = A vec u``; ``vec`` is component-major, row-major in space."""

    A: np.ndarray
    components: tuple
    shape: tuple

    @property
    def n(self) -> int:
        return self.A.shape[0]


def _rhs_vec(problem: Problem, t: float):
    shape = (problem.ncomp,) + problem.grid.shape

    def f(v):
        return problem.rhs(t, v.reshape(shape)).ravel()

    return f


def check_linearity(problem: Problem, t: float = 0.0, trials: int = 3, seed: int = 0, rtol: float = 1e-10) -> None:
    """Spot-check ``f(a u + b v) = a f(u) + b f(v)`` on random states."""
    rng = np.random.default_rng(seed)
    f = _rhs_vec(problem, t)
    n = problem.ncomp * problem.grid.size
    for _ in range(trials):
        u, v = rng.standard_normal(n), rng.standard_normal(n)
        a, b = rng.standard_normal(2)
        lhs = f(a * u + b * v)
        rhs = a * f(u) + b * f(v)
        scale = max(np.max(np.abs(lhs)), 1.0)
        if np.max(np.abs(lhs - rhs)) > rtol * scale:
            raise LinearityError("right-hand side is not linear; zero the boundary data and forcing")


def assemble_operator(problem: Problem, t: float = 0.0, check: bool = True) -> DenseOperator:
    """Column-by-column assembly of the RHS at time ``t`` with zero boundary data."""
    hom = problem.homogeneous()
    if check:
        check_linearity(hom, t)
    f = _rhs_vec(hom, t)
    n = hom.ncomp * hom.grid.size
    A = np.empty((n, n))
    e = np.zeros(n)
    for j in range(n):
        e[j] = 1.0
        A[:, j] = f(e)
        e[j] = 0.0
    return DenseOperator(A, COMPONENTS[hom.mode], hom.grid.shape)


def finite_difference_jacobian(problem: Problem, eps: float = 1e-7, t: float = 0.0) -> np.ndarray:
    """Forward-difference Jacobian of the full RHS at the zero state."""
    f = _rhs_vec(problem, t)
    n = problem.ncomp * problem.grid.size
    f0 = f(np.zeros(n))
    J = np.empty((n, n))
    e = np.zeros(n)
    for j in range(n):
        e[j] = eps
        J[:, j] = (f(e) - f0) / eps
        e[j] = 0.0
    return J


def spectrum(op: DenseOperator, validate: int = 10, seed: int = 0, tol: float = 1e-8):
    """All eigenvalues of ``op.A``; ``validate`` random pairs are residual-checked."""
    A = op.A
    try:
        w, V = sla.eig(A, check_finite=True)
    except sla.LinAlgError as exc:
        raise RuntimeError(f"eigensolver did not converge: {exc}") from exc
    if validate:
        rng = np.random.default_rng(seed)
        idx = rng.choice(w.size, size=min(validate, w.size), replace=False)
        scale = max(np.linalg.norm(A, 2) if A.shape[0] <= 512 else np.linalg.norm(A, 1), 1.0)
        for i in idx:
            v = V[:, i]
            r = np.linalg.norm(A @ v - w[i] * v)
            if r > tol * scale * np.linalg.norm(v):
                raise RuntimeError(f"eigenpair {i} residual {r:.3e} exceeds tolerance")
    return w


@dataclass
class ContainmentReport:
    dt: float
    slack: float
    n_outside: int
    worst_eig: complex
    worst_amp: float
    n_weak: int

    @property
    def contained(self) -> bool:
        return self.n_outside == 0

    @property
    def verdict(self) -> str:
        if self.worst_amp <= 1 + self.slack:
            return "stable"
        if self.worst_amp <= 1 + WEAK_GROWTH:
            return "weak growth"
        return "unstable"

    def summary(self) -> str:
        return (
            f"dt={self.dt:.6g} worst |R(lambda dt)|^2={self.worst_amp:.12f} at lambda={self.worst_eig:.6g} "
            f"outside(slack={self.slack:g})={self.n_outside} verdict={self.verdict}"
        )


def check_rk4_containment(eigs, dt: float, slack: float = 1e-8) -> ContainmentReport:
    """Flag eigenvalues whose RK4 amplification at ``lambda dt`` exceeds ``1 + slack``."""
    eigs = np.atleast_1d(np.asarray(eigs, dtype=complex))
    amp = rk4_amplification(eigs * dt)
    k = int(np.argmax(amp))
    return ContainmentReport(
        dt=dt,
        slack=slack,
        n_outside=int(np.sum(amp > 1 + slack)),
        worst_eig=complex(eigs[k]),
        worst_amp=float(amp[k]),
        n_weak=int(np.sum((amp > 1 + slack) & (amp <= 1 + WEAK_GROWTH))),
    )


def write_eigs_csv(path, eigs, report: ContainmentReport = None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im"])
        for lam in np.asarray(eigs, dtype=complex):
            w.writerow([repr(float(lam.real)), repr(float(lam.imag))])
        if report is not None:
            fh.write("# " + report.summary() + "\n")
