import numpy as np
import pytest
from hypothesis import given, strategies as st

from qpot import model as M

unit = st.floats(0.01, 0.99)


@given(unit)
def test_phi_involution_asep(r):
    em = M.asep()
    assert em.phi(em.phi(r)) == pytest.approx(r, abs=1e-10)
    assert float(em.phi(r)) == pytest.approx(1.0 - r, abs=1e-10)


@given(unit)
def test_phi_preserves_flux(r):
    em = M.cubic(0.2)
    p = float(em.phi(r))
    assert float(em.f(p)) == pytest.approx(float(em.f(r)), abs=1e-10)
    assert (p - em.rho_star) * (r - em.rho_star) <= 1e-12


def test_phi_special_values(em):
    K = em.capacity
    assert float(em.phi(em.rho_star)) == pytest.approx(em.rho_star, abs=1e-12)
    assert float(em.phi(0.0)) == pytest.approx(K, abs=1e-12)
    assert float(em.phi(K)) == pytest.approx(0.0, abs=1e-12)


def test_entropy_normalized(em):
    rs = em.rho_star
    assert abs(float(em.h(rs))) < 1e-10
    assert abs(float(em.hprime(rs))) < 1e-10
    x = np.linspace(0.05, 0.95, 50)
    assert np.all(em.hsecond(x) > 0)


def test_flux_rejects_convex():
    with pytest.raises(M.ModelError):
        M.FluxModel(lambda r: np.asarray(r) * (np.asarray(r) - 1.0), lambda r: 2 * np.asarray(r) - 1.0)


@pytest.mark.parametrize("rl,rr,phase", [(0.2, 0.6, "LD"), (0.4, 0.8, "HD"), (0.3, 0.7, "COEX"),
                                         (0.8, 0.2, "MC"), (0.4, 0.2, "LD"), (0.8, 0.6, "HD")])
def test_phase_diagram(asep, rl, rr, phase):
    assert M.classify(asep, rl, rr).phase == phase


def test_classify_rejects_boundary_values(asep):
    with pytest.raises(M.DomainError):
        M.classify(asep, 0.0, 0.5)


@given(unit, unit)
def test_boundary_costs_nonnegative(r, d):
    em = M.asep()
    assert float(M.boundary_cost_left(em, r, d)) >= -1e-12
    assert float(M.boundary_cost_right(em, r, d)) >= -1e-12


def test_boundary_cost_vanishes_at_datum(em):
    x = np.linspace(0.1, 0.9, 9)
    assert np.allclose(M.boundary_cost_left(em, x, x), 0.0, atol=1e-12)
    assert np.allclose(M.boundary_cost_right(em, x, x), 0.0, atol=1e-12)


def test_boundary_cost_matches_quadrature(em):
    for r, d in [(0.3, 0.6), (0.7, 0.2), (0.45, 0.55)]:
        assert float(M.boundary_cost_left(em, r, d)) == pytest.approx(
            M.boundary_cost_quad(em, r, d, "left"), abs=1e-8)
        assert float(M.boundary_cost_right(em, r, d)) == pytest.approx(
            M.boundary_cost_quad(em, r, d, "right"), abs=1e-8)


@given(unit, unit)
def test_pi_sign(a, b):
    em = M.asep()
    p = float(M.pi_production(em, a, b))
    if abs(a - b) > 1e-6:
        assert np.sign(p) == np.sign(a - b)


def test_pi_matches_quadrature(em):
    for a, b in [(0.2, 0.7), (0.8, 0.3)]:
        assert float(M.pi_production(em, a, b)) == pytest.approx(M.pi_quad(em, a, b), abs=1e-8)


def test_rho_critical_asep(asep):
    spec = M.make_spec(asep, 0.3, 0.7)
    assert M.rho_critical(asep, spec) == pytest.approx(0.5, abs=1e-12)


def test_load_model_descriptors():
    em, spec = M.load_model({"flux": "asep", "rho_l": 0.2, "rho_r": 0.6})
    assert spec.phase == "LD" and em.capacity == 1.0
    em, spec = M.load_model('{"flux": {"cubic": 0.2}}')
    assert spec is None and em.rho_star != 0.5
    with pytest.raises(M.ModelError):
        M.load_model({"flux": "nonsense"})


def test_stationary_set_distance(asep):
    spec = M.make_spec(asep, 0.3, 0.7)
    ss = M.stationary_set(asep, spec)
    assert ss.is_family
    assert ss.distance(M.shock_profile(0.3, 0.7, 0.25, 64)) == pytest.approx(0.0, abs=1e-14)
    ld = M.stationary_set(asep, M.make_spec(asep, 0.2, 0.6))
    assert ld.distance(np.full(10, 0.3)) == pytest.approx(0.1)
