import numpy as np
import pytest

from fourier_penalty.equations import Problem
from fourier_penalty.geometry import build_ray_table, halfspace, mask_chi_h
from fourier_penalty.penalty import PenaltyConfig, PenaltyOperator
from fourier_penalty.spectral import Grid
from fourier_penalty.stability import (
    LinearityError,
    assemble_operator,
    check_linearity,
    check_rk4_containment,
    finite_difference_jacobian,
    spectrum,
    write_eigs_csv,
)


def _problem_1d(N=32, m=1):
    grid = Grid(1, N, 16.0, origin=-2.0)
    h = grid.dx
    geom = halfspace()
    rays = build_ray_table(geom, grid, h, 1.0)
    chi = mask_chi_h(geom, grid, h)
    eta = 0.2 * grid.dx
    pen = PenaltyOperator(grid, rays, PenaltyConfig(eta, h, 1.0, m), "1d")
    return Problem("1d", grid, eta, chi, pen)


def test_operator_matches_finite_difference_jacobian():
    p = _problem_1d()
    A = assemble_operator(p).A
    J = finite_difference_jacobian(p.homogeneous())
    np.testing.assert_allclose(A, J, atol=1e-5 * np.max(np.abs(A)))


def test_operator_reproduces_rhs():
    p = _problem_1d()
    op = assemble_operator(p)
    u = np.random.default_rng(0).standard_normal((2, 32))
    np.testing.assert_allclose(op.A @ u.ravel(), p.rhs(0.0, u).ravel(), atol=1e-10)


def test_free_operator_spectrum_is_imaginary():
    p = Problem("1d", Grid(1, 16, 2 * np.pi))
    w = spectrum(assemble_operator(p))
    assert np.max(np.abs(w.real)) < 1e-10
    assert np.max(np.abs(w.imag)) == pytest.approx(7.0, abs=1e-8)


def test_nonlinear_rhs_is_detected():
    p = Problem("1d", Grid(1, 8, 1.0))
    p.rhs = lambda t, u: u**2
    with pytest.raises(LinearityError):
        check_linearity(p)


def test_containment_on_synthetic_eigenvalues():
    dt = 0.1
    assert check_rk4_containment([2.8j / dt, -1.0, -20.0], dt).verdict == "stable"
    rep = check_rk4_containment([2.9j / dt, 0.0], dt)
    assert rep.n_outside == 1 and not rep.contained
    assert check_rk4_containment([1e-3 / dt * 1j + 2e-4], dt).verdict == "weak growth"
    assert check_rk4_containment([1.0], dt).verdict == "unstable"
    assert "verdict" in rep.summary()


def test_eigs_csv(tmp_path):
    w = np.array([1j, -0.5 + 2j])
    rep = check_rk4_containment(w, 0.1)
    path = tmp_path / "eigs.csv"
    write_eigs_csv(path, w, rep)
    lines = path.read_text().splitlines()
    assert lines[0] == "re,im"
    assert float(lines[2].split(",")[0]) == -0.5
    assert lines[-1].startswith("# dt=")
