import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fourier_penalty import cases
from fourier_penalty.cases import (
    CASES,
    fd_derivative,
    fit_rate,
    get_case,
    pollution_grid,
    run_case,
    run_pollution_point,
    setup_case,
)


def test_fit_rate_exact_power_laws():
    Ns = [32, 64, 128, 256]
    r, res = fit_rate([3.0 / N for N in Ns], Ns)
    assert r == pytest.approx(1.0, abs=1e-12) and res < 1e-12
    r, _ = fit_rate([0.7 / N**2.5 for N in Ns], Ns)
    assert r == pytest.approx(2.5, abs=1e-12)


@given(st.floats(0.1, 4.0), st.floats(1e-3, 1e3))
def test_fit_rate_recovers_any_power(p, c):
    Ns = [16, 32, 64]
    assert fit_rate([c * N**-p for N in Ns], Ns)[0] == pytest.approx(p, abs=1e-9)


def test_fit_rate_errors():
    with pytest.raises(ValueError):
        fit_rate([0.1, 0.0], [8, 16])
    with pytest.raises(ValueError):
        fit_rate([0.1], [8])


def test_registry_and_overrides():
    assert {"gauss1d", "tm_circle", "te_circle", "cavity", "sphere3d", "cylinder_scatter", "gyroid_demo"} <= set(CASES)
    s = get_case("tm_circle", m=1, N=None)
    assert s.m == 1 and s.N == CASES["tm_circle"].N
    with pytest.raises(KeyError):
        get_case("nope")
    with pytest.raises(ValueError):
        get_case("tm_circle", bogus=1)


@pytest.mark.parametrize("cid", sorted(CASES))
def test_every_case_sets_up(cid):
    spec = CASES[cid]
    N = {1: 64, 2: 32, 3: 16}[spec.dim]
    if cid == "gyroid_demo":
        N = 32
    s = setup_case(spec, N)
    assert s.u0.shape == (s.problem.ncomp,) + s.grid.shape
    assert np.all(np.isfinite(s.u0))
    assert s.error_mask.any()


def test_parameter_scaling():
    s = setup_case(get_case("tm_circle"), 32)
    dx = s.grid.dx
    dt = 0.4 * dx
    assert s.problem.eta == pytest.approx(4 * dt)
    assert s.rays.h == pytest.approx(2 * dx)


def test_zero_amplitude_pulse_has_zero_error():
    spec = get_case("gauss1d", pulse=dict(E0=0.0, x0=7.0, sigma=1 / np.sqrt(2.0), omega0=10.0), T=0.5)
    r = run_case(spec, 256)
    assert r.err_E == 0.0 and r.err_H == 0.0


def test_run_case_writes_outputs(tmp_path):
    spec = get_case("tm_circle", T=0.2)
    r = run_case(spec, 16, out_dir=str(tmp_path), snapshot_every=1)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "diagnostics.csv" in names and "errors.csv" in names
    fields = [n for n in names if n.startswith("field_")]
    assert len(fields) >= 2
    text = (tmp_path / fields[0]).read_text().splitlines()
    assert text[0].startswith("# case=tm_circle dim=2 N=16")
    assert text[1] == "x,y,Hx,Hy,Ez"
    assert len(text) == 2 + 16 * 16
    with open(tmp_path / "errors.csv") as fh:
        row = next(csv.DictReader(fh))
    assert float(row["Linf_E"]) == pytest.approx(r.err_E)


def test_report_csv(tmp_path):
    rep = cases.ConvergenceReport("x", 0, [8, 16, 32], [1, 0.5, 0.25], [2, 1, 0.5], 1.0, 1.0, 1.0, 0.0, True)
    cases.write_report_csv(tmp_path / "errors.csv", rep)
    lines = (tmp_path / "errors.csv").read_text().splitlines()
    assert lines[0] == "N,Linf_E,Linf_H,Linf_u,rate_E,rate_H,rate_u"
    assert lines[1].split(",")[:4] == ["8", "1", "2", "2"]


def test_convergence_study_needs_three_grids():
    with pytest.raises(ValueError):
        cases.convergence_study("tm_circle", Ns=[16, 32])


def test_convergence_study_small():
    rep = cases.convergence_study("tm_circle", Ns=[16, 32, 64], T=0.3)
    assert len(rep.err_E) == 3 and np.isfinite(rep.rate_u)


def test_fd_derivative_orders():
    errs = {2: [], 4: []}
    for N in (32, 64):
        x = np.arange(N) * 2 * np.pi / N
        for o in errs:
            errs[o].append(np.max(np.abs(fd_derivative(np.sin(x), 2 * np.pi / N, o) - np.cos(x))))
    assert np.log2(errs[2][0] / errs[2][1]) == pytest.approx(2, abs=0.1)
    assert np.log2(errs[4][0] / errs[4][1]) == pytest.approx(4, abs=0.1)
    with pytest.raises(ValueError):
        fd_derivative(np.zeros(4), 1.0, 3)


def test_pollution_grid():
    assert pollution_grid(10, 20) % 8 == 0
    assert pollution_grid(10, 20) == 512
    assert pollution_grid(0, 20) == 8


def test_pollution_point_without_carrier_runs():
    N, err = run_pollution_point(0.0, 20, 1, "spectral", spec=get_case("pollution1d", T=0.5))
    assert N == 8 and np.isfinite(err)


def test_pollution_fd_point_runs():
    N, err = run_pollution_point(10.0, 20, 1, "fd2", spec=get_case("pollution1d", T=0.5))
    assert N == 512 and np.isfinite(err)
