import numpy as np
import pytest
from hypothesis import given, strategies as st

from qpot import solver as S
from qpot.fields import cell_centers

unit = st.floats(0.01, 0.99)


@given(unit, unit)
def test_godunov_flux_riemann(a, b):
    from qpot import model as M
    fl = M.asep_flux()
    F = S.godunov_flux(fl, a, b)
    if a <= b:
        assert F == pytest.approx(min(fl.f(a), fl.f(b)))
    else:
        assert F == pytest.approx(fl.f(min(max(0.5, b), a)))


def test_stable_dt_cfl(asep):
    dt, n = S.stable_dt(asep, 0.01, 1.0, 0.9)
    assert dt * n == pytest.approx(1.0)
    assert dt * asep.flux.speed_bound / 0.01 <= 0.9 + 1e-12


def test_constant_state_is_preserved(asep):
    fld = S.solve_ibvp(asep, np.full(50, 0.3), 0.3, 0.3, 0.5)
    assert np.allclose(fld.frames, 0.3, atol=1e-14)


def test_mass_balance(asep):
    rng = np.random.default_rng(0)
    u0 = rng.uniform(0.1, 0.9, 100)
    fld = S.solve_ibvp(asep, u0, 0.2, 0.7, 0.5)
    bf = fld.meta["boundary_flux"]
    net = fld.dt * np.sum(bf[:, 0] - bf[:, 1])
    assert np.mean(fld.frames[-1]) - np.mean(u0) == pytest.approx(net, abs=1e-12)


def test_dt_violating_cfl_rejected(asep):
    with pytest.raises(ValueError):
        S.solve_ibvp(asep, np.full(10, 0.5), 0.5, 0.5, 1.0, dt=1.0)


def test_characteristics_rejects_increasing(asep):
    with pytest.raises(S.PreconditionError):
        S.characteristics_monotone(asep, np.array([0.2, 0.6]), 0.1, 0.5)


def test_characteristics_fan(asep):
    # 0.8 | 0.2 at x = 0.5 opens a fan with value (1 - s)/2 at speed s
    G = np.where(cell_centers(10) < 0.5, 0.8, 0.2)
    t = 0.2
    x = np.array([0.5 + 0.1 * t])
    assert S.characteristics_monotone(asep, G, t, x)[0] == pytest.approx(0.45, abs=1e-10)


def test_hopf_half_line_preconditions(asep):
    with pytest.raises(S.PreconditionError):
        S.hopf_half_line(asep, np.full(10, 0.9), 0.2, 0.5, 1.0, 0.0)
    with pytest.raises(S.PreconditionError):
        S.hopf_half_line(asep, np.full(10, 0.3), 0.6, 0.5, 1.0, 0.0)


def test_hopf_half_line_uniform_data(asep):
    # r | rho shock for r < rho: value r behind it, rho ahead
    r, rho, t = 0.2, 0.6, 0.5
    v = float(asep.flux.shock_speed(r, rho))
    u = S.hopf_half_line(asep, np.full(20, rho), r, rho, t, np.array([t * v - 0.05, t * v + 0.05]))
    assert u == pytest.approx([r, rho], abs=1e-9)


def test_jvg_matches_godunov_on_constant(asep):
    n = 100
    u0 = np.full(n, 0.4)
    g = S.solve_ibvp(asep, u0, 0.2, 0.6, 0.5).frames[-1]
    j = S.jvg_density(asep, u0, 0.2, 0.6, 0.5)
    assert np.mean(np.abs(g - j)) <= 2.0 / n
