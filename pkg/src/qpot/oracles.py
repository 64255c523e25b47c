"""Exact wave diagrams of rho_tilde for uniform targets.

Each case builds the reversed-time solution rho_tilde(t, x) = rho(-t, 1 - x)
as a list of regions bounded by lines and shock curves. Shock curves that
cross a rarefaction fan are integrated from their Rankine-Hugoniot ODE.

Case ids: "B.a" .. "B.j" for rho_l < rho_r and "C.1.1" .. "C.3.3" for
rho_l > rho_r (flux-range subsection, then case).
"""
from __future__ import annotations

import math

import numpy as np

from .fields import Clip, Const, Fan, Line, Region, WaveDiagram, ode_curve
from .model import rho_critical

TOL = 1e-12


class CaseError(ValueError):
    pass


def _need(cond, msg):
    if not cond:
        raise CaseError(msg)


class _Kit:
    """Shorthands bound to one model."""

    def __init__(self, em, t_max):
        fl = em.flux
        self.em, self.fl, self.t_max = em, fl, t_max
        self.rs = fl.rho_star

    def f(self, r):
        return float(self.fl.f(r))

    def fp(self, r):
        return float(self.fl.fprime(r))

    def fpi(self, s):
        return float(self.fl.fprime_inv(s))

    def v(self, a, b):
        return float(self.fl.shock_speed(a, b))

    def phi(self, r):
        return float(self.em.phi(r))

    def line(self, x0, slope, t0=0.0, clip=True):
        ln = Line(float(x0), float(t0), float(slope))
        return Clip(ln) if clip else ln

    def shock_into_fan(self, t0, x0, state, fan_x0, state_left, stop_at):
        """Shock between a constant state and the fan centred at (0, fan_x0)."""
        def rhs(t, x):
            u = self.fpi((x - fan_x0) / t)
            return self.v(state, u) if state_left else self.v(u, state)
        return ode_curve(rhs, t0, x0, t0 + self.t_max, stop_at=stop_at)


def _reg(t0, t1, left, right, value):
    content = value if isinstance(value, Fan) else Const(float(value))
    return Region(float(t0), float(t1), left, right, content)


ZERO = Line(0.0, 0.0, 0.0)
ONE = Line(1.0, 0.0, 0.0)
INF = math.inf


def _cross_time(curve, target):
    """First sample time at which an ODE curve sits on its stopping value."""
    hit = np.flatnonzero(np.abs(curve.xs - target) < 1e-12)
    return float(curve.ts[hit[0]]) if hit.size else INF


# shock regime: rho_l < rho_r ---------------------------------------------------------

def _case_B(k, case, rho, spec, y):
    rl, rr, rs = spec.rho_l, spec.rho_r, k.rs
    rc = rho_critical(k.em, spec)
    fl, fr = k.f(rl), k.f(rr)
    coex = abs(fl - fr) <= 1e-12 * k.fl.fmax
    R = []
    meta = {}
    _need(rl < rr, "B cases need rho_l < rho_r")
    if case in "abc":
        _need(fl <= fr + 1e-12, "B.a-c need f(rho_l) <= f(rho_r)")
    if case == "a":
        _need(rho <= rl + TOL, "B.a needs rho <= rho_l")
        R += [_reg(0, INF, ZERO, k.line(0, k.fp(rl)), rl),
              _reg(0, INF, k.line(0, k.fp(rl)), k.line(0, k.fp(rho)), Fan(0.0)),
              _reg(0, INF, k.line(0, k.fp(rho)), ONE, rho)]
        y, theta, tau = 1.0, 0.0, 1.0 / k.fp(rl)
    elif case == "b":
        _need(rl - TOL <= rho <= rs + TOL and rho < rc, "B.b needs rho_l <= rho <= rho* and rho < rho_c")
        s = k.v(rho, rl)
        R += [_reg(0, INF, ZERO, k.line(0, s), rl), _reg(0, INF, k.line(0, s), ONE, rho)]
        y, theta, tau = 1.0, 0.0, 1.0 / s
    elif case == "c":
        _need(rs < rho < rc, "B.c needs rho* < rho < rho_c")
        s = k.v(rl, rho)
        t1 = 1.0 / (s - k.fp(rho))
        xt = k.shock_into_fan(t1, t1 * s, rl, 1.0, True, 1.0)
        R += [_reg(0, t1, ZERO, k.line(0, s), rl),
              _reg(0, t1, k.line(0, s), k.line(1, k.fp(rho)), rho),
              _reg(0, t1, k.line(1, k.fp(rho)), ONE, Fan(1.0)),
              _reg(t1, INF, ZERO, xt, rl),
              _reg(t1, INF, xt, ONE, Fan(1.0))]
        y, theta, tau = 1.0, 0.0, _cross_time(xt, 1.0)
    elif case == "d":
        _need(coex and rc < rho < rr, "B.d needs f(rho_l) = f(rho_r) and rho_c < rho < rho_r")
        s = k.v(rho, rr)
        R += [_reg(0, INF, ZERO, k.line(1, s), rho), _reg(0, INF, k.line(1, s), ONE, rr)]
        y, theta, tau = 0.0, 0.0, -1.0 / s
    elif case == "e":
        _need(coex and rho > rr, "B.e needs f(rho_l) = f(rho_r) and rho > rho_r")
        R += [_reg(0, INF, ZERO, k.line(1, k.fp(rho)), rho),
              _reg(0, INF, k.line(1, k.fp(rho)), k.line(1, k.fp(rr)), Fan(1.0)),
              _reg(0, INF, k.line(1, k.fp(rr)), ONE, rr)]
        y, theta, tau = 0.0, 0.0, -1.0 / k.fp(rr)
    elif case in "fg":
        pl, pr = k.phi(rl), k.phi(rr)
        if case == "f":
            _need(rho > rc and rr <= rs + TOL, "B.f needs rho > rho_c and rho_l < rho_r <= rho*")
        else:
            _need(rho > rc and rl < rs < rr, "B.g needs rho > rho_c and rho_l < rho* < rho_r")
        _need(rho <= pl + TOL, "B.f/g are encoded for rho <= phi(rho_l)")
        va = k.v(pr, pl)
        theta = -1.0 / va
        sa = k.line(1, va)
        R += [_reg(0, theta, ZERO, k.line(1, k.v(rho, pl)), rho),
              _reg(0, theta, k.line(1, k.v(rho, pl)), sa, pl)]
        se = k.v(rl, pr)
        entering = k.line(0, se, t0=theta)
        if case == "f":
            R += [_reg(0, theta, sa, k.line(1, k.fp(pr)), pr),
                  _reg(0, theta, k.line(1, k.fp(pr)), ONE, Fan(1.0))]
            t1 = (1.0 + theta * se) / (se - k.fp(pr))
            xt = k.shock_into_fan(t1, 1.0 + t1 * k.fp(pr), rl, 1.0, True, 1.0)
            R += [_reg(theta, t1, ZERO, entering, rl),
                  _reg(theta, t1, entering, k.line(1, k.fp(pr)), pr),
                  _reg(theta, t1, k.line(1, k.fp(pr)), ONE, Fan(1.0)),
                  _reg(t1, INF, ZERO, xt, rl),
                  _reg(t1, INF, xt, ONE, Fan(1.0))]
            tau = _cross_time(xt, 1.0)
        else:
            R += [_reg(0, theta, sa, ONE, pr),
                  _reg(theta, INF, ZERO, entering, rl),
                  _reg(theta, INF, entering, ONE, pr)]
            tau = theta + 1.0 / se
        y = 0.0
        meta["v"] = va
    elif case in "hij":
        _need(coex, f"B.{case} needs f(rho_l) = f(rho_r)")
        _need(abs(rho - rc) < 1e-9, f"B.{case} needs rho = rho_c")
        if case == "h":
            _need(rc < rs, "B.h needs rho_c < rho*")
        elif case == "i":
            _need(rc > rs, "B.i needs rho_c > rho*")
        else:
            _need(abs(rc - rs) < 1e-9, "B.j needs rho_c = rho*")
        _need(y is not None and 0.0 <= y <= 1.0, "coexistence cases need y in [0, 1]")
        a = 1.0 - y
        vlc, vcr = k.v(rl, rho), k.v(rho, rr)
        top = k.line(a, vlc)
        bot = k.line(a, vcr)
        mid = Line(a, 0.0, 0.0)
        if case == "h":
            t1 = a / (k.fp(rho) - vcr)
            xt = k.shock_into_fan(t1, t1 * k.fp(rho), rr, 0.0, False, 0.0) if a > 0 else None
            R += [_reg(0, INF, top, ONE, rho), _reg(0, INF, mid, top, rl),
                  _reg(0, t1, bot, mid, rr),
                  _reg(0, t1, k.line(0, k.fp(rho)), bot, rho),
                  _reg(0, t1, ZERO, k.line(0, k.fp(rho)), Fan(0.0))]
            if xt is not None:
                R += [_reg(t1, INF, xt, mid, rr), _reg(t1, INF, ZERO, xt, Fan(0.0))]
            t2 = _cross_time(xt, 0.0) if xt is not None else 0.0
            tau = max(t2, y / vlc)
        elif case == "i":
            t1 = y / (vlc - k.fp(rho))
            xt = k.shock_into_fan(t1, 1.0 + t1 * k.fp(rho), rl, 1.0, True, 1.0) if y > 0 else None
            R += [_reg(0, INF, bot, mid, rr), _reg(0, INF, ZERO, bot, rho),
                  _reg(0, t1, k.line(1, k.fp(rho)), ONE, Fan(1.0)),
                  _reg(0, t1, top, k.line(1, k.fp(rho)), rho),
                  _reg(0, t1, mid, top, rl)]
            if xt is not None:
                R += [_reg(t1, INF, xt, ONE, Fan(1.0)), _reg(t1, INF, mid, xt, rl)]
            t2 = _cross_time(xt, 1.0) if xt is not None else 0.0
            tau = max(t2, (y - 1.0) / vcr)
        else:
            R += [_reg(0, INF, top, ONE, rho), _reg(0, INF, mid, top, rl),
                  _reg(0, INF, bot, mid, rr), _reg(0, INF, ZERO, bot, rho)]
            tau = max(y / vlc, (y - 1.0) / vcr)
        theta = INF
    else:
        raise CaseError(f"unknown or unsupported B case {case!r}")
    meta.update({"y": y, "theta_tilde": theta})
    return R, tau, meta


# rarefaction regime: rho_l > rho_r ---------------------------------------------------

def _case_C(k, sub, case, rho, spec):
    rl, rr, rs = spec.rho_l, spec.rho_r, k.rs
    _need(rl > rr, "C cases need rho_l > rho_r")
    pl, pr = k.phi(rl), k.phi(rr)
    R = []
    tau = INF
    if sub == 1:
        _need(rl <= rs + TOL, "C.1 needs rho_r <= rho_l <= rho*")
        if case == 1:
            _need(rho >= pl - TOL, "C.1.1 needs phi(rho_l) <= rho")
            t2 = -1.0 / k.fp(pl)
            xt = k.shock_into_fan(t2, 0.0, rl, 1.0, True, 1.0)
            R += [_reg(0, t2, ZERO, k.line(1, k.fp(rho)), rho),
                  _reg(0, t2, k.line(1, k.fp(rho)), ONE, Fan(1.0)),
                  _reg(t2, INF, ZERO, xt, rl), _reg(t2, INF, xt, ONE, Fan(1.0))]
            tau = _cross_time(xt, 1.0)
        elif case == 2:
            _need(rs < rho < pl, "C.1.2 needs rho* < rho < phi(rho_l)")
            s = k.v(rl, rho)
            t3 = 1.0 / (s - k.fp(rho))
            yt = k.shock_into_fan(t3, t3 * s, rl, 1.0, True, 1.0)
            R += [_reg(0, t3, ZERO, k.line(0, s), rl),
                  _reg(0, t3, k.line(0, s), k.line(1, k.fp(rho)), rho),
                  _reg(0, t3, k.line(1, k.fp(rho)), ONE, Fan(1.0)),
                  _reg(t3, INF, ZERO, yt, rl), _reg(t3, INF, yt, ONE, Fan(1.0))]
            tau = _cross_time(yt, 1.0)
        elif case == 3:
            _need(rho <= rs + TOL, "C.1.3 needs rho <= rho*")
            if rho >= rl:
                s = k.v(rl, rho)
                R += [_reg(0, INF, ZERO, k.line(0, s), rl), _reg(0, INF, k.line(0, s), ONE, rho)]
                tau = 1.0 / s if s > 0 else 0.0
            else:
                # below rho_l the inflow is a fan from x = 0
                R += [_reg(0, INF, ZERO, k.line(0, k.fp(rl)), rl),
                      _reg(0, INF, k.line(0, k.fp(rl)), k.line(0, k.fp(rho)), Fan(0.0)),
                      _reg(0, INF, k.line(0, k.fp(rho)), ONE, rho)]
                tau = 1.0 / k.fp(rl)
        else:
            raise CaseError("C.1 has cases 1-3")
    elif sub == 2:
        _need(rr < rs < rl, "C.2 needs rho_r < rho* < rho_l")
        if case == 1:
            _need(rho >= rs - TOL, "C.2.1 needs rho >= rho*")
            R += [_reg(0, INF, ZERO, k.line(1, k.fp(rho)), rho),
                  _reg(0, INF, k.line(1, k.fp(rho)), ONE, Fan(1.0))]
        elif case == 2:
            _need(rho <= rs + TOL, "C.2.2 needs rho <= rho*")
            R += [_reg(0, INF, ZERO, k.line(0, k.fp(rho)), Fan(0.0)),
                  _reg(0, INF, k.line(0, k.fp(rho)), ONE, rho)]
        else:
            raise CaseError("C.2 has cases 1-2")
    elif sub == 3:
        _need(rr >= rs - TOL, "C.3 needs rho* <= rho_r <= rho_l")
        if case == 1:
            _need(rho <= pr + TOL, "C.3.1 needs rho <= phi(rho_r)")
            t2 = 1.0 / k.fp(pr)
            xt = k.shock_into_fan(t2, 1.0, rr, 0.0, False, 0.0)
            R += [_reg(0, t2, ZERO, k.line(0, k.fp(rho)), Fan(0.0)),
                  _reg(0, t2, k.line(0, k.fp(rho)), ONE, rho),
                  _reg(t2, INF, ZERO, xt, Fan(0.0)), _reg(t2, INF, xt, ONE, rr)]
            tau = _cross_time(xt, 0.0)
        elif case == 2:
            _need(pr < rho < rs, "C.3.2 needs phi(rho_r) < rho < rho*")
            s = k.v(rr, rho)
            t3 = 1.0 / (k.fp(rho) - s)
            yt = k.shock_into_fan(t3, 1.0 + t3 * s, rr, 0.0, False, 0.0)
            R += [_reg(0, t3, ZERO, k.line(0, k.fp(rho)), Fan(0.0)),
                  _reg(0, t3, k.line(0, k.fp(rho)), k.line(1, s), rho),
                  _reg(0, t3, k.line(1, s), ONE, rr),
                  _reg(t3, INF, ZERO, yt, Fan(0.0)), _reg(t3, INF, yt, ONE, rr)]
            tau = _cross_time(yt, 0.0)
        elif case == 3:
            _need(rho >= rs - TOL, "C.3.3 needs rho >= rho*")
            if rho <= rr:
                s = k.v(rr, rho)
                R += [_reg(0, INF, ZERO, k.line(1, s), rho), _reg(0, INF, k.line(1, s), ONE, rr)]
                tau = -1.0 / s if s < 0 else 0.0
            else:
                # above rho_r the outflow is a fan from x = 1
                R += [_reg(0, INF, ZERO, k.line(1, k.fp(rho)), rho),
                      _reg(0, INF, k.line(1, k.fp(rho)), k.line(1, k.fp(rr)), Fan(1.0)),
                      _reg(0, INF, k.line(1, k.fp(rr)), ONE, rr)]
                tau = -1.0 / k.fp(rr)
        else:
            raise CaseError("C.3 has cases 1-3")
    else:
        raise CaseError("C subsections are 1-3")
    return R, tau, {}


# public -----------------------------------------------------------------------------

def appendix_oracle(em, case_id, rho, spec, y=None, t_max=60.0):
    """Exact wave diagram of rho_tilde for the uniform target rho.

    Raises CaseError naming the violated inequality when (spec, rho) does not
    belong to the requested case.
    """
    k = _Kit(em, t_max)
    cid = case_id.strip()
    rho = float(rho)
    if cid.startswith("B."):
        R, tau, meta = _case_B(k, cid[2:], rho, spec, y)
    elif cid.startswith("C."):
        try:
            sub, case = (int(p) for p in cid[2:].split("."))
        except ValueError as e:
            raise CaseError(f"malformed case id {case_id!r}") from e
        R, tau, meta = _case_C(k, sub, case, rho, spec)
    else:
        raise CaseError(f"case ids start with B. or C., got {case_id!r}")
    if math.isfinite(tau):
        meta["tau"] = tau
    return WaveDiagram(k.fl, R, np.inf, tau if math.isfinite(tau) else None, cid, meta)


class MirroredDiagram:
    """rho_tilde(t, x) = K - d(t, 1 - x), the particle-hole image of a diagram."""

    def __init__(self, d, capacity, name, meta):
        self.inner, self.K = d, float(capacity)
        self.flux, self.tau, self.name, self.meta = d.flux, d.tau, name, meta
        self.horizon = d.horizon

    def eval_many(self, t, x):
        return self.K - self.inner.eval_many(t, 1.0 - np.asarray(x, dtype=float))

    def __call__(self, t, x):
        return self.eval_many(t, x)


def particle_hole_symmetric(em, n=257, tol=1e-10):
    """True when phi(r) = K - r, so that x -> 1 - x, r -> K - r maps solutions to solutions."""
    x = np.linspace(0.0, em.capacity, n)
    return bool(np.max(np.abs(em.phi(x) - (em.capacity - x))) <= tol)


def hd_oracle(em, case_id, rho, spec, y=None, t_max=60.0):
    """Oracle for f(rho_l) > f(rho_r) through the particle-hole mirror of a B case."""
    from .model import make_spec
    if not particle_hole_symmetric(em):
        raise CaseError("mirrored oracles need phi(r) = K - r")
    K = em.capacity
    mspec = make_spec(em, K - spec.rho_r, K - spec.rho_l)
    d = appendix_oracle(em, case_id, K - rho, mspec, y=None if y is None else 1.0 - y, t_max=t_max)
    return MirroredDiagram(d, K, "mirror " + d.name, dict(d.meta))


B_CASES = tuple("B." + c for c in "abcdefghij")
C_CASES = ("C.1.1", "C.1.2", "C.1.3", "C.2.1", "C.2.2", "C.3.1", "C.3.2", "C.3.3")


def find_case(em, rho, spec, y=None):
    """The first encoded case whose inequalities hold, or None.

    In the shock regime with f(rho_l) > f(rho_r) the B cases are used through
    the particle-hole mirror when the model allows it.
    """
    if spec.rho_l >= spec.rho_r:
        build, cases = appendix_oracle, C_CASES
    elif spec.phase == "HD":
        build, cases = hd_oracle, B_CASES
    else:
        build, cases = appendix_oracle, B_CASES
    for c in cases:
        try:
            return build(em, c, rho, spec, y=y)
        except CaseError:
            continue
    return None
