import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qpot import model as M
from qpot import staticfn as SF

profiles = arrays(float, st.integers(4, 40), elements=st.floats(0.02, 0.98))


def test_stationary_profiles_have_zero_S(asep):
    for rl, rr, val in [(0.2, 0.6, 0.2), (0.4, 0.8, 0.8), (0.8, 0.2, 0.5), (0.4, 0.2, 0.4)]:
        spec = M.make_spec(asep, rl, rr)
        assert SF.quasi_potential_static(asep, np.full(32, val), spec) == pytest.approx(0.0, abs=1e-12)


def test_coexistence_uniform_rho_c_minimizers(asep):
    spec = M.make_spec(asep, 0.3, 0.7)
    sm = SF.S_shock_min(asep, np.full(50, 0.5), spec)
    assert sm.intervals == [(0.0, 1.0)]


@given(profiles)
def test_S_nonnegative(rho):
    em = M.asep()
    for rl, rr in [(0.2, 0.6), (0.8, 0.2), (0.3, 0.7)]:
        assert SF.quasi_potential_static(em, rho, M.make_spec(em, rl, rr)) >= -1e-12


@given(profiles)
def test_shock_min_is_minimum(rho):
    em = M.asep()
    spec = M.make_spec(em, 0.2, 0.6)
    sm = SF.S_shock_min(em, rho, spec)
    Kmin = min(float(em.Kfun(0.2)), float(em.Kfun(0.6)))
    for y in np.linspace(0, 1, 7):
        assert SF.S_shock(em, rho, y, spec) - Kmin >= sm.value - 1e-12


@given(profiles)
def test_optimal_F_admissible(rho):
    em = M.asep()
    spec = M.make_spec(em, 0.8, 0.2)
    F = SF.optimal_F(em, rho, spec)
    SF.check_admissible_F(F, spec)


@given(profiles, st.integers(0, 2**31))
def test_optimal_F_beats_random(rho, seed):
    em = M.asep()
    spec = M.make_spec(em, 0.7, 0.3)
    best = SF.S_rarefaction_sup(em, rho, spec)
    Fs = SF.random_admissible_F(np.random.default_rng(seed), rho.size, spec, 200)
    assert best >= np.max(SF.S_rarefaction_batch(em, rho, Fs, spec)) - 1e-9


@given(arrays(float, st.integers(3, 30), elements=st.floats(-1, 1)))
def test_truncated_hull_properties(incr):
    R = np.concatenate([[0.0], np.cumsum(incr) / incr.size])
    h = SF.truncated_concave_hull(R, 0.5, -0.5)
    assert np.all(h.values >= R - 1e-12)
    assert np.all(np.diff(h.slopes) <= 1e-12)
    assert np.all((h.slopes <= 0.5 + 1e-12) & (h.slopes >= -0.5 - 1e-12))
    c = SF.truncated_convex_hull(R, -0.5, 0.5)
    assert np.all(c.values <= R + 1e-12)


def test_regime_errors(asep):
    with pytest.raises(SF.RegimeError):
        SF.optimal_F(asep, np.full(8, 0.5), M.make_spec(asep, 0.2, 0.6))
    with pytest.raises(M.DomainError):
        SF.quasi_potential_static(asep, np.full(8, 1.5), M.make_spec(asep, 0.2, 0.6))


@given(profiles)
def test_F_has_no_tied_moves(rho):
    em = M.asep()
    assert SF.optimal_F_ties(em, rho, M.make_spec(em, 0.7, 0.3)) == 0
