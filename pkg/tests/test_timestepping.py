import numpy as np
import pytest
from hypothesis import given, strategies as st

from fourier_penalty import oracles
from fourier_penalty.equations import Problem
from fourier_penalty.spectral import Grid
from fourier_penalty.timestepping import (
    NonFiniteState,
    RunConfig,
    energy,
    evolve,
    max_stable_dt,
    rk4_amplification,
    rk4_step,
)


def _manufactured(N=16):
    grid = Grid(2, N, 2 * np.pi)
    X, Y = grid.mesh()
    p = Problem("tm", grid, forcing=lambda s: oracles.manufactured_forcing(X, Y, s))
    return p, X, Y


def _global_error(dt, T=1.0):
    p, X, Y = _manufactured()
    u0 = np.stack(oracles.manufactured_tm_exact(X, Y, 0.0))
    out = evolve(p, u0, RunConfig(T=T, dt=dt), diagnostics=False)
    return np.max(np.abs(out.u - np.stack(oracles.manufactured_tm_exact(X, Y, T))))


def test_rk4_step_halving_gives_order_four():
    e1, e2, e3 = (_global_error(dt) for dt in (0.2, 0.1, 0.05))
    assert np.log2(e1 / e2) == pytest.approx(4.0, abs=0.3)
    assert np.log2(e2 / e3) == pytest.approx(4.0, abs=0.3)


@given(st.floats(0.0, 2.8))
def test_amplification_on_imaginary_axis(r):
    assert rk4_amplification(1j * r) == pytest.approx(1 - r**6 / 72 + r**8 / 576, rel=1e-12, abs=1e-14)


def test_amplification_matches_exponential_for_small_steps():
    z = np.array([0.01j, -0.01, 0.005 + 0.003j])
    np.testing.assert_allclose(rk4_amplification(z), np.abs(np.exp(z)) ** 2, rtol=1e-10)


def test_imaginary_axis_limit():
    assert rk4_amplification(2.82j) <= 1.0
    assert rk4_amplification(2.84j) > 1.0
    assert max_stable_dt(1, 2 * np.pi, 64) == pytest.approx(2.83 / np.pi * 2 * np.pi / 64)


def test_resolve_lands_on_T():
    assert RunConfig(T=1.0, dt_coeff=0.3).resolve(1.0) == (4, 0.25)
    assert RunConfig(T=1.0, dt=0.25).resolve(1.0) == (4, 0.25)
    assert RunConfig(T=0.0, dt=0.1).resolve(1.0) == (0, 0.1)
    with pytest.raises(ValueError):
        RunConfig(T=1.0).resolve(1.0)
    with pytest.raises(ValueError):
        RunConfig(T=1.0, dt=0.0).resolve(1.0)
    with pytest.raises(ValueError):
        RunConfig(T=1.0, dt=1.0, check_stability=True).resolve(0.1, 1, 2 * np.pi, 64)


def test_non_finite_state_is_reported():
    p, X, Y = _manufactured()
    u0 = p.zeros()
    u0[0, 0, 0] = np.nan
    with pytest.raises(NonFiniteState) as exc:
        evolve(p, u0, RunConfig(T=0.2, dt=0.1))
    assert exc.value.step == 1


def test_shape_mismatch_is_rejected():
    p, _, _ = _manufactured()
    with pytest.raises(ValueError):
        evolve(p, np.zeros((2, 16, 16)), RunConfig(T=0.1, dt=0.1))


def test_free_space_energy_is_conserved():
    grid = Grid(2, 32, 2 * np.pi)
    X, Y = grid.mesh()
    p = Problem("tm", grid)
    u0 = p.zeros()
    u0[2] = np.exp(-4 * ((X - np.pi) ** 2 + (Y - np.pi) ** 2))
    out = evolve(p, u0, RunConfig(T=2.0, dt_coeff=0.2))
    e = np.array([d[3] for d in out.diagnostics])
    assert np.max(np.abs(e / e[0] - 1)) < 1e-5
    assert energy(p, out.u) <= energy(p, u0) * (1 + 1e-12)


def test_rk4_step_exact_for_cubic_in_time():
    # du/dt = f(t) with f quadratic is integrated exactly by one RK4 step
    class P:
        @staticmethod
        def rhs(t, u):
            return np.full_like(u, 3 * t * t + 1)

    u = rk4_step(P, 0.5, np.zeros(3), 0.25)
    np.testing.assert_allclose(u, (0.75**3 + 0.75) - (0.5**3 + 0.5))


def test_diagnostics_and_snapshots(tmp_path):
    p, X, Y = _manufactured()
    u0 = np.stack(oracles.manufactured_tm_exact(X, Y, 0.0))
    out = evolve(p, u0, RunConfig(T=0.4, dt=0.1, snapshot_every=2))
    assert len(out.diagnostics) == 5
    assert [s[0] for s in out.snapshots] == pytest.approx([0.0, 0.2, 0.4])
    path = tmp_path / "diag.csv"
    out.write_diagnostics(path)
    assert path.read_text().splitlines()[0] == "step,t,energy_physical,energy_total,max_div_E"


def test_rerun_is_bit_identical():
    a, b = _global_error(0.1), _global_error(0.1)
    assert a == b
