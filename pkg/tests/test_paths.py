import numpy as np
import pytest

from qpot import model as M
from qpot import staticfn as SF
from qpot.fields import SpaceTimeField
from qpot.paths import build_path, reverse, stationary_target, theta_tilde


def test_reverse_is_involution():
    rng = np.random.default_rng(0)
    f = SpaceTimeField(rng.uniform(size=(5, 7)), 0.1, -0.4)
    g = reverse(reverse(f))
    assert np.array_equal(g.frames, f.frames) and g.t0 == pytest.approx(f.t0)


def test_theta_tilde():
    assert theta_tilde(0.25, 0.5) == pytest.approx(1.5)
    assert theta_tilde(0.25, -0.5) == pytest.approx(0.5)
    assert theta_tilde(0.5, 0.0) == np.inf
    assert theta_tilde(1.0, 0.0) == 0.0


@pytest.mark.parametrize("rl,rr,r", [(0.2, 0.6, 0.5), (0.8, 0.2, 0.3), (0.3, 0.7, 0.5)])
def test_path_ends_at_target_and_starts_stationary(asep, rl, rr, r):
    spec = M.make_spec(asep, rl, rr)
    n = 100
    res = build_path(asep, np.full(n, r), spec)
    assert np.mean(np.abs(res.field.frames[-1] - r)) < 1e-9
    S = SF.quasi_potential_static(asep, np.full(n, r), spec)
    assert abs(res.action.total - S) <= 0.1 * max(S, 0.01)
    if spec.phase != "MC":
        assert res.finite_time
        prof, T = stationary_target(asep, res, spec)
        assert T == pytest.approx(res.T)


def test_summary_is_flat(asep):
    res = build_path(asep, np.full(50, 0.3), M.make_spec(asep, 0.2, 0.6))
    s = res.summary()
    assert s["phase"] == "LD" and "action" in s
