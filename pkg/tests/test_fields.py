import io

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qpot.fields import (Const, Fan, FieldError, Line, Profile, Region, SpaceTimeField, WaveDiagram,
                         eval_diagram, l1_distance, rasterize, rh_violations)
from qpot import model as M


def test_profile_validation():
    with pytest.raises(FieldError):
        Profile(np.array([0.5]))
    with pytest.raises(FieldError):
        Profile(np.array([0.5, np.nan]))
    p = Profile.uniform(0.3, 8)
    assert p.cumulative()[-1] == pytest.approx(0.3)
    assert p.dx == 1 / 8


@given(arrays(float, (4, 5), elements=st.floats(0, 1)))
def test_field_csv_roundtrip(frames):
    f = SpaceTimeField(frames, 0.125, -0.5)
    g = SpaceTimeField.from_csv(io.StringIO(f.to_csv()))
    assert np.array_equal(g.frames, f.frames)
    assert g.dt == pytest.approx(f.dt) and g.t0 == pytest.approx(f.t0)


def test_field_csv_header_required():
    with pytest.raises(FieldError):
        SpaceTimeField.from_csv("a,b,c\n0,0,0\n")


def test_frame_at_bounds():
    f = SpaceTimeField(np.zeros((3, 4)), 0.5)
    assert f.t1 == 1.0
    with pytest.raises(FieldError):
        f.frame_at(2.0)


def test_l1_distance():
    assert l1_distance(np.zeros(4), np.ones(4)) == 1.0
    with pytest.raises(FieldError):
        l1_distance(np.zeros(4), np.zeros(5))


def _riemann_diagram(em, a, b):
    """Single shock from x = 0.5 between a < b."""
    v = float(em.flux.shock_speed(a, b))
    s = Line(0.5, 0.0, v)
    return WaveDiagram(em.flux, [Region(0, 1, Line(0, 0, 0), s, Const(a)),
                                 Region(0, 1, s, Line(1, 0, 0), Const(b))], horizon=1.0)


def test_diagram_eval_and_rh(asep):
    d = _riemann_diagram(asep, 0.2, 0.6)
    assert eval_diagram(d, 0.5, 0.1) == 0.2
    assert eval_diagram(d, 0.5, 0.9) == 0.6
    assert rh_violations(d) < 1e-12
    with pytest.raises(FieldError):
        d(2.0, np.array([0.5]))


def test_fan_region(asep):
    # fan centred at 0.5 spanning f'(0.8)..f'(0.2)
    lo, hi = Line(0.5, 0, float(asep.flux.fprime(0.8))), Line(0.5, 0, float(asep.flux.fprime(0.2)))
    d = WaveDiagram(asep.flux, [Region(0, 1, Line(0, 0, 0), lo, Const(0.8)),
                                Region(0, 1, lo, hi, Fan(0.5)),
                                Region(0, 1, hi, Line(1, 0, 0), Const(0.2))], horizon=1.0)
    assert eval_diagram(d, 0.5, 0.5) == pytest.approx(0.5, abs=1e-12)
    fld = rasterize(d, 20, 0.25, 1.0)
    assert fld.n_frames == 5
    assert np.all(np.diff(fld.frames[-1]) <= 1e-12)
