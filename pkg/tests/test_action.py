import numpy as np
import pytest
from hypothesis import given, strategies as st

from qpot import action as A
from qpot import model as M
from qpot.fields import SpaceTimeField
from qpot.paths import reverse
from qpot.solver import solve_ibvp


def test_v_grid_contains_rho_star(em):
    v, w = A.v_grid(em)
    assert em.rho_star in v
    assert np.all(np.diff(v) > 0) and np.all(w > 0)
    # trapezoid weights over [v_1, v_n] plus half the end gaps
    assert np.sum(w) == pytest.approx(em.capacity - 0.5 * (v[0] + em.capacity - v[-1]), rel=1e-12)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_kruzkov_pair_is_entropy_pair(v, r):
    em = M.asep()
    eta, q = A.kruzkov_pair(em, np.array([v]), r)
    assert eta[0] >= 0
    # q is the flux of eta: q = sign-part of f(r) - f(v)
    if v > em.rho_star and r > v:
        assert q[0] == pytest.approx(float(em.f(r) - em.f(v)))


@given(st.integers(1, 40), st.integers(1, 8))
def test_symmetric_starts_reversal(n, b):
    s = A._symmetric_starts(n, b)
    ends = np.append(s[1:], n)
    sizes = ends - s
    assert s[0] == 0 and np.all(sizes > 0)
    assert np.array_equal(sizes, sizes[::-1])


def test_entropy_solution_has_no_bulk_action(asep):
    rng = np.random.default_rng(2)
    fld = solve_ibvp(asep, rng.uniform(0.1, 0.9, 64), 0.3, 0.6, 0.5)
    s = A.production_sums(asep, fld)
    assert s.positive <= A.discretization_floor(fld)
    assert s.negative > 0


def test_reversal_swaps_masses(asep):
    fld = solve_ibvp(asep, np.where(np.arange(64) < 32, 0.2, 0.7), 0.2, 0.7, 0.5)
    s, r = A.production_sums(asep, fld), A.production_sums(asep, reverse(fld))
    assert r.positive == pytest.approx(s.negative, rel=0.05)


def test_constant_field_zero_action(asep):
    fld = SpaceTimeField(np.full((20, 32), 0.2), 0.01)
    tot = A.total_action(asep, fld, M.make_spec(asep, 0.2, 0.6))
    assert tot.total == pytest.approx(0.0, abs=1e-12)


def test_ordering_and_sampler(asep):
    rng = np.random.default_rng(4)
    fld = SpaceTimeField(np.clip(rng.uniform(0.2, 0.8, (24, 32)), 0, 1), 0.01)
    spec = M.make_spec(asep, 0.3, 0.6)
    s = A.production_sums(asep, fld)
    tot = A.total_action(asep, fld, spec, sums=s)
    assert s.j0 <= s.positive + 1e-12 <= tot.total + 2e-12
    assert A.sampler_bound(asep, fld, spec) <= tot.total + tot.floor


def test_boundary_action_vanishes_at_data(asep):
    fld = SpaceTimeField(np.tile(np.linspace(0.2, 0.6, 16), (10, 1)), 0.01)
    fld.frames[:, 0], fld.frames[:, -1] = 0.2, 0.6
    l, r = A.boundary_action(asep, fld, M.make_spec(asep, 0.2, 0.6))
    assert l == pytest.approx(0.0, abs=1e-14) and r == pytest.approx(0.0, abs=1e-14)
