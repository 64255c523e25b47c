"""Flux and entropy models, the involution, boundary costs and phases.

A model is a strictly concave flux f on [0, K] with f(0) = f(K) = 0 together
with a uniformly convex entropy h satisfying h'(phi(r)) = -h'(r), where phi is
the decreasing involution with f(phi(r)) = f(r).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline


class ModelError(ValueError):
    """Raised when a flux/entropy pair fails validation."""


class DomainError(ValueError):
    pass


PHASES = ("LD", "HD", "MC", "COEX")


def bisect(fn, lo, hi, target, increasing=True, tol=1e-14, maxiter=200):
    """Vectorized bisection for fn(x) = target on [lo, hi] (fn monotone)."""
    target = np.asarray(target, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        val = fn(mid)
        up = val < target if increasing else val > target
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
        if np.all(hi - lo <= tol):
            break
    return 0.5 * (lo + hi)


# tanh-sinh nodes on (-1, 1); integrands with log blow-up at the ends are fine
_DE_T = np.arange(-3.5, 3.5 + 1e-12, 1.0 / 16.0)
_DE_U = 0.5 * np.pi * np.sinh(_DE_T)
_DE_W = (1.0 / 16.0) * 0.5 * np.pi * np.cosh(_DE_T) / np.cosh(_DE_U) ** 2
# distance of each node to the nearer endpoint, computed without cancellation
_DE_GAP = 2.0 / (1.0 + np.exp(2.0 * np.abs(_DE_U)))
_DE_LEFT = _DE_T < 0


def integrate(fn, a, b):
    """Vectorized double-exponential quadrature of fn over [a, b] (elementwise)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    half = 0.5 * (b - a)[..., None]
    x = np.where(_DE_LEFT, a[..., None] + half * _DE_GAP, b[..., None] - half * _DE_GAP)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = fn(x)
    # outermost nodes can round onto a singular endpoint; their weight is negligible
    vals = np.where(np.isfinite(vals), vals, 0.0)
    return np.sum(vals * _DE_W, axis=-1) * half[..., 0]


class FluxModel:
    """Strictly concave flux on [0, K] vanishing at both ends."""

    def __init__(self, f, fprime, capacity=1.0, name="custom", fsecond=None, check=True):
        self.f = f
        self.fprime = fprime
        self.capacity = float(capacity)
        self.name = name
        self._fsecond = fsecond
        K = self.capacity
        if K <= 0:
            raise ModelError("capacity must be positive")
        # f' is decreasing, its zero is the flux maximizer
        self.rho_star = float(bisect(fprime, 0.0, K, 0.0, increasing=False))
        self.fmax = float(f(self.rho_star))
        self.speed_bound = float(max(abs(fprime(0.0)), abs(fprime(K))))
        if check:
            self.validate()
        self.phi = build_involution(self)

    def fsecond(self, rho):
        if self._fsecond is not None:
            return self._fsecond(rho)
        d = 1e-5
        return (self.fprime(rho + d) - self.fprime(rho - d)) / (2 * d)

    def validate(self, n=1001):
        K = self.capacity
        if abs(self.f(0.0)) > 1e-12 or abs(self.f(K)) > 1e-12:
            raise ModelError("flux must vanish at 0 and K")
        x = np.linspace(0.0, K, n)
        d2 = np.diff(self.f(x), 2)
        if not np.all(d2 < 0):
            raise ModelError("flux is not strictly concave on the test grid")
        if not (0.0 < self.rho_star < K):
            raise ModelError("flux maximizer must be interior")

    def phi_prime(self, rho):
        """Derivative of the involution, from f'(r) = f'(phi(r)) phi'(r)."""
        rho = np.asarray(rho, dtype=float)
        u = rho - self.rho_star
        p = self.phi(rho)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = self.fprime(rho) / self.fprime(p)
        # near rho* the ratio is 0/0; use the second order expansion instead
        d = 1e-3
        rs = self.rho_star
        f2 = (self.fprime(rs + d) - self.fprime(rs - d)) / (2 * d)
        f3 = (self.fprime(rs + d) - 2 * self.fprime(rs) + self.fprime(rs - d)) / d**2
        a = -f3 / (3 * f2)
        near = -1.0 + 2.0 * a * u
        return np.where(np.abs(u) < 1e-5, near, ratio)

    def fprime_inv(self, s):
        """Inverse of f' on the whole of [0, K], clamped to the range of f'."""
        s = np.asarray(s, dtype=float)
        return bisect(self.fprime, 0.0, self.capacity, s, increasing=False)

    def fprime_inv_left(self, s):
        s = np.asarray(s, dtype=float)
        return bisect(self.fprime, 0.0, self.rho_star, s, increasing=False)

    def fprime_inv_right(self, s):
        s = np.asarray(s, dtype=float)
        return bisect(self.fprime, self.rho_star, self.capacity, s, increasing=False)

    def f_conj(self, v):
        """sup over rho of f(rho) - v rho (attained at (f')^{-1}(v), clamped)."""
        r = self.fprime_inv(v)
        return self.f(r) - v * r

    def f_conj_concave(self, theta):
        """inf over rho of theta rho - f(rho); equals -f_conj(theta)."""
        return -self.f_conj(theta)

    def shock_speed(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        d = b - a
        small = np.abs(d) < 1e-12
        with np.errstate(divide="ignore", invalid="ignore"):
            v = (self.f(b) - self.f(a)) / np.where(small, 1.0, d)
        out = np.where(small, self.fprime(a), v)
        return out if out.ndim else float(out)


def build_involution(flux):
    """Return phi with f(phi(r)) = f(r), phi decreasing, phi(rho*) = rho*.

    A dense table solved by bisection gives the first guess; bracketed
    Newton steps on f(phi) = f(r) polish it to rounding level.
    """
    K, rs, f = flux.capacity, flux.rho_star, flux.f

    def solve(rho, tol):
        target = f(rho)
        left = rho <= rs
        # solve on the opposite branch only; sgn * f is increasing there
        sgn = np.where(left, -1.0, 1.0)
        lo, hi = np.where(left, rs, 0.0), np.where(left, K, rs)
        return bisect(lambda m: sgn * f(m), lo, hi, sgn * target, tol=tol), target, lo, hi

    knots = np.linspace(0.0, K, 4097)
    table, _, _, _ = solve(knots, 1e-15)
    table[0], table[-1] = K, 0.0
    # near rho* the table straddles the fold; use phi(rho* + u) = rho* - u + a u^2
    d = 1e-3 * K
    f2 = (flux.fprime(rs + d) - flux.fprime(rs - d)) / (2 * d)
    f3 = (flux.fprime(rs + d) - 2 * flux.fprime(rs) + flux.fprime(rs - d)) / d**2
    a = float(-f3 / (3 * f2))
    near = 0.02 * K

    def phi(rho):
        rho = np.asarray(rho, dtype=float)
        if np.any(rho < -1e-12) or np.any(rho > K + 1e-12):
            raise DomainError("density outside [0, K]")
        rho = np.clip(rho, 0.0, K)
        target = f(rho)
        left = rho <= rs
        lo, hi = np.where(left, rs, 0.0), np.where(left, K, rs)
        u = rho - rs
        guess = np.where(np.abs(u) < near, rs - u + a * u * u, np.interp(rho, knots, table))
        out = np.clip(guess, lo, hi)
        # the series is exact to rounding very close to rho*, where Newton is noise
        polish = np.abs(u) >= 1e-5 * K
        for _ in range(3):
            d = flux.fprime(out)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = (f(out) - target) / d
            ok = polish & np.isfinite(step)
            out = np.clip(np.where(ok, out - step, out), lo, hi)
        out = np.where(rho == rs, rs, out)
        out = np.where(rho == 0.0, K, out)
        out = np.where(rho == K, 0.0, out)
        return out if out.ndim else float(out)

    return phi


class EntropyModel:
    """Uniformly convex entropy h normalized so that h(rho*) = h'(rho*) = 0.

    h and the entropy flux g (g' = h' f') default to quadrature of hprime.
    """

    def __init__(self, flux, hprime, hsecond, h=None, g=None, name="custom",
                 symmetry_tol=1e-8, check=True):
        self.flux = flux
        self.hprime = hprime
        self.hsecond = hsecond
        self._h = h
        self._g = g
        self.name = name
        self.symmetry_tol = symmetry_tol
        if check:
            self.validate()

    # convenience passthroughs
    @property
    def f(self):
        return self.flux.f

    @property
    def phi(self):
        return self.flux.phi

    @property
    def rho_star(self):
        return self.flux.rho_star

    @property
    def capacity(self):
        return self.flux.capacity

    def h(self, rho):
        if self._h is not None:
            return self._h(rho)
        rs = self.rho_star
        return integrate(self.hprime, rs, np.asarray(rho, dtype=float))

    def g(self, rho):
        if self._g is not None:
            return self._g(rho)
        rs = self.rho_star
        fp, hp = self.flux.fprime, self.hprime
        return integrate(lambda r: hp(r) * fp(r), rs, np.asarray(rho, dtype=float))

    def k(self, rho):
        """Integral of phi h'' based at rho*, in the closed form phi h' + h(phi)."""
        rho = np.asarray(rho, dtype=float)
        p = self.phi(rho)
        return p * self.hprime(rho) + self.h(p)

    def Kfun(self, rho):
        rho = np.asarray(rho, dtype=float)
        return self.h(rho) - rho * self.hprime(rho) + self.k(rho)

    def hprime_inv(self, theta):
        theta = np.asarray(theta, dtype=float)
        K = self.capacity
        return bisect(self.hprime, 1e-300, K - 1e-16 * K, theta, increasing=True)

    def chem_flux(self, theta):
        return self.f(self.hprime_inv(theta))

    def legendre(self, theta):
        """h*(theta) = sup_rho [theta rho - h(rho)]; exposed, not used downstream."""
        r = self.hprime_inv(theta)
        return theta * r - self.h(r)

    def L(self, j):
        """The increasing function with K(rho) = L(f(rho)), on [0, f(rho*)]."""
        j = np.asarray(j, dtype=float)
        r = bisect(self.f, 0.0, self.rho_star, j, increasing=True)
        return self.Kfun(r)

    def relative_entropy(self, rho, rho0):
        return self.h(rho) - self.h(rho0) - self.hprime(rho0) * (np.asarray(rho) - rho0)

    def relative_flux(self, rho, rho0):
        """g(rho, rho0) = g(rho) - g(rho0) - h'(rho0) [f(rho) - f(rho0)]."""
        f = self.f
        return self.g(rho) - self.g(rho0) - self.hprime(rho0) * (f(rho) - f(rho0))

    def validate(self, n=1000):
        K, rs = self.capacity, self.rho_star
        x = np.linspace(0.0, K, n + 2)[1:-1]
        hs = self.hsecond(x)
        if not np.all(hs > 0):
            raise ModelError("entropy is not uniformly convex")
        p = self.phi(x)
        tol = self.symmetry_tol
        sym = np.abs(hs + self.hsecond(p) * self.flux.phi_prime(x)) / np.maximum(1.0, hs)
        if np.max(sym) > tol:
            raise ModelError("entropy violates h''(r) = -h''(phi(r)) phi'(r)")
        if abs(self.hprime(rs)) > tol or np.max(np.abs(self.hprime(p) + self.hprime(x))) > tol:
            raise ModelError("entropy is not normalized so that h'(phi) = -h'")


def symmetric_entropy(flux, name=None):
    """Entropy with h'(r) = log r - log phi(r); reduces to the ASEP entropy."""
    phi = flux.phi

    def hprime(r):
        r = np.asarray(r, dtype=float)
        return np.log(r) - np.log(phi(r))

    def hsecond(r):
        r = np.asarray(r, dtype=float)
        return 1.0 / r - flux.phi_prime(r) / phi(r)

    return EntropyModel(flux, hprime, hsecond, name=name or f"symmetric[{flux.name}]")


# built-in models -----------------------------------------------------------

def asep_flux():
    return FluxModel(lambda r: np.asarray(r) * (1.0 - np.asarray(r)),
                     lambda r: 1.0 - 2.0 * np.asarray(r), 1.0, "asep",
                     fsecond=lambda r: -2.0 + 0.0 * np.asarray(r))


def asep():
    """f = r(1-r) with the Bernoulli entropy relative to r* = 1/2."""
    flux = asep_flux()

    def h(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = r * np.log(r) + (1 - r) * np.log1p(-r) + np.log(2.0)
        return np.where(r <= 0, np.log(2.0), np.where(r >= 1, np.log(2.0), out))

    def hprime(r):
        r = np.asarray(r, dtype=float)
        return np.log(r) - np.log1p(-r)

    def hsecond(r):
        r = np.asarray(r, dtype=float)
        return 1.0 / (r * (1 - r))

    def g(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = r * (1 - r) * (np.log(r) - np.log1p(-r))
        out = np.where((r <= 0) | (r >= 1), 0.0, out)
        return out + 0.5 * (1 - 2 * r)

    return EntropyModel(flux, hprime, hsecond, h=h, g=g, name="asep")


def cubic_flux(a):
    if not abs(a) < 1.0 / 3.0:
        raise ModelError("cubic model needs |a| < 1/3 for strict concavity")
    a = float(a)
    return FluxModel(lambda r: np.asarray(r) * (1 - np.asarray(r)) * (1 + a * np.asarray(r)),
                     lambda r: 1 + 2 * (a - 1) * np.asarray(r) - 3 * a * np.asarray(r) ** 2,
                     1.0, f"cubic({a:g})",
                     fsecond=lambda r: 2 * (a - 1) - 6 * a * np.asarray(r))


def cubic(a):
    """f = r(1-r)(1+a r) with the symmetric entropy built from its involution."""
    return symmetric_entropy(cubic_flux(a), name=f"cubic({float(a):g})")


def table_flux(values, capacity=1.0):
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 8:
        raise ModelError("flux table needs at least 8 samples on a uniform grid")
    x = np.linspace(0.0, capacity, values.size)
    if np.any(np.diff(values, 2) >= 0):
        raise ModelError("tabulated flux is not strictly concave")
    sp = CubicSpline(x, values)
    d1, d2 = sp.derivative(), sp.derivative(2)
    return FluxModel(lambda r: sp(np.asarray(r, dtype=float)),
                     lambda r: d1(np.asarray(r, dtype=float)), capacity, "table",
                     fsecond=lambda r: d2(np.asarray(r, dtype=float)))


def table_entropy(flux, values, tol=1e-4):
    """Entropy tabulated on a uniform grid of (0, K) (endpoints excluded).

    Spline second derivatives are only accurate to the table resolution, so the
    symmetry check uses a looser tolerance than the analytic models.
    """
    values = np.asarray(values, dtype=float)
    K = flux.capacity
    x = np.linspace(0.0, K, values.size + 2)[1:-1]
    sp = CubicSpline(x, values)
    rs = flux.rho_star
    c0, c1 = float(sp(rs)), float(sp.derivative()(rs))
    d1, d2 = sp.derivative(), sp.derivative(2)
    return EntropyModel(flux,
                        lambda r: d1(np.asarray(r, dtype=float)) - c1,
                        lambda r: d2(np.asarray(r, dtype=float)),
                        h=lambda r: sp(np.asarray(r, dtype=float)) - c0 - c1 * (np.asarray(r) - rs),
                        name="table", symmetry_tol=tol)


def load_model(desc):
    """Build (EntropyModel, BoundarySpec or None) from a JSON-like descriptor."""
    if isinstance(desc, str):
        desc = json.loads(desc)
    if not isinstance(desc, dict):
        raise ModelError("model descriptor must be a JSON object")
    fl = desc.get("flux", "asep")
    en = desc.get("entropy")
    if fl == "asep":
        flux = asep_flux()
        if en in (None, "asep"):
            em = asep()
        else:
            em = _entropy_from(flux, en)
    elif isinstance(fl, dict) and "cubic" in fl:
        flux = cubic_flux(fl["cubic"])
        em = _entropy_from(flux, en)
    elif isinstance(fl, dict) and "table" in fl:
        flux = table_flux(fl["table"], fl.get("capacity", 1.0))
        em = _entropy_from(flux, en)
    else:
        raise ModelError(f"unknown flux descriptor {fl!r}")
    spec = None
    if "rho_l" in desc and "rho_r" in desc:
        spec = classify(em, float(desc["rho_l"]), float(desc["rho_r"]))
    return em, spec


def _entropy_from(flux, en):
    if en in (None, "symmetric"):
        return symmetric_entropy(flux)
    if en == "asep":
        # only consistent with a flux whose involution is r -> K - r
        K = flux.capacity
        return EntropyModel(flux,
                            lambda r: np.log(np.asarray(r) / (K - np.asarray(r))),
                            lambda r: K / (np.asarray(r) * (K - np.asarray(r))), name="asep-entropy")
    if isinstance(en, dict) and "table" in en:
        return table_entropy(flux, en["table"], en.get("tol", 1e-4))
    raise ModelError(f"unknown entropy descriptor {en!r}")


# boundary costs -------------------------------------------------------------

def _check_density(em, rho):
    rho = np.asarray(rho, dtype=float)
    K = em.capacity
    if np.any(rho < -1e-12) or np.any(rho > K + 1e-12) or np.any(~np.isfinite(rho)):
        raise DomainError("density outside [0, K]")
    return np.clip(rho, 0.0, K)


def boundary_cost_left(em, rho, rho_l):
    """i^l(rho, rho_l) in closed piecewise form."""
    rho = _check_density(em, rho)
    rho, rho_l = np.broadcast_arrays(rho, np.asarray(rho_l, dtype=float))
    rs, phi, g = em.rho_star, em.phi, em.g
    pl = np.asarray(phi(rho_l))
    pr = np.asarray(phi(rho))
    gl = em.relative_flux
    low = rho_l <= rs
    out = np.zeros(rho.shape)
    # rho_l <= rho*
    a = low & (rho <= rs) & (rho != rho_l)
    b = low & (rho > rs) & (rho < pl)
    # rho_l > rho*
    c = ~low & (rho <= pl)
    d = ~low & (rho > pl) & (rho < rs)
    if np.any(a):
        out[a] = gl(rho[a], rho_l[a])
    if np.any(b):
        out[b] = gl(pr[b], rho_l[b])
    if np.any(c):
        out[c] = gl(rho[c], rho_l[c])
    if np.any(d):
        out[d] = g(rho[d]) - g(pr[d])
    out = np.maximum(out, 0.0)
    return out if out.ndim else float(out)


def boundary_cost_right(em, rho, rho_r):
    """i^r(rho, rho_r) in closed piecewise form."""
    rho = _check_density(em, rho)
    rho, rho_r = np.broadcast_arrays(rho, np.asarray(rho_r, dtype=float))
    rs, phi, g = em.rho_star, em.phi, em.g
    pr_ = np.asarray(phi(rho_r))
    p = np.asarray(phi(rho))
    gl = em.relative_flux
    low = rho_r <= rs
    out = np.zeros(rho.shape)
    a = low & (rho >= pr_)
    b = low & (rho > rs) & (rho < pr_)
    c = ~low & (rho >= rs) & (rho != rho_r)
    d = ~low & (rho > pr_) & (rho < rs)
    if np.any(a):
        out[a] = -gl(rho[a], rho_r[a])
    if np.any(b):
        out[b] = g(p[b]) - g(rho[b])
    if np.any(c):
        out[c] = -gl(rho[c], rho_r[c])
    if np.any(d):
        out[d] = -gl(p[d], rho_r[d])
    out = np.maximum(out, 0.0)
    return out if out.ndim else float(out)


def kruzkov_relative_flux(em, v, rho, rho0):
    """q_v(rho, rho0); vanishes unless v lies between rho and rho0."""
    v, rho, rho0 = np.broadcast_arrays(*(np.asarray(z, dtype=float) for z in (v, rho, rho0)))
    lo, hi = np.minimum(rho, rho0), np.maximum(rho, rho0)
    inside = (v > lo) & (v < hi)
    return np.where(inside, np.sign(rho - rho0) * (em.f(rho) - em.f(v)), 0.0)


def boundary_cost_quad(em, rho, datum, side="left"):
    """Direct quadrature of the Kruzkov integral defining i^l / i^r (oracle)."""
    from scipy.integrate import quad
    rho, datum = float(rho), float(datum)
    if rho == datum:
        return 0.0
    lo, hi = min(rho, datum), max(rho, datum)
    sgn = 1.0 if side == "left" else -1.0

    def integrand(v):
        q = float(kruzkov_relative_flux(em, v, rho, datum))
        return float(em.hsecond(v)) * max(sgn * q, 0.0)

    pts = [p for p in (em.rho_star, float(em.phi(rho)), float(em.phi(datum))) if lo < p < hi]
    val, _ = quad(integrand, lo, hi, points=pts or None, epsabs=1e-12, epsrel=1e-12, limit=400)
    return val


def bln_admissible(em, side, rho, datum, tol=1e-12):
    cost = boundary_cost_left if side == "left" else boundary_cost_right
    return np.asarray(cost(em, rho, datum)) <= tol


def bln_set(em, side, datum):
    """Admissible trace set as a list of closed intervals (points are degenerate)."""
    rs, K = em.rho_star, em.capacity
    p = float(em.phi(datum))
    if side == "left":
        return [(datum, datum), (p, K)] if datum <= rs else [(rs, K)]
    return [(0.0, rs)] if datum <= rs else [(datum, datum), (0.0, p)]


def in_intervals(x, intervals, tol=0.0):
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=bool)
    for a, b in intervals:
        out |= (x >= a - tol) & (x <= b + tol)
    return out


# shocks and local production -----------------------------------------------

def shock_speed(em, a, b):
    return em.flux.shock_speed(a, b)


def pi_production(em, rho_minus, rho_plus):
    """Jump entropy production [g - v h]^+_- at Rankine-Hugoniot speed."""
    a = np.asarray(rho_minus, dtype=float)
    b = np.asarray(rho_plus, dtype=float)
    v = em.flux.shock_speed(a, b)
    out = (em.g(b) - v * em.h(b)) - (em.g(a) - v * em.h(a))
    out = np.where(np.abs(b - a) < 1e-12, 0.0, out)
    return out if np.ndim(out) else float(out)


def pi_quad(em, a, b):
    from scipy.integrate import quad
    if a == b:
        return 0.0
    v = float(em.flux.shock_speed(a, b))
    val, _ = quad(lambda r: float(em.hsecond(r)) * (float(em.f(r)) - float(em.f(a)) - v * (r - a)),
                  a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
    return -val


def sigma(em, rho, xi, spec):
    """sigma(rho, xi) = int_{rho_l}^{rho_r} h''(r)[f(phi r) - f(rho) - xi(phi r - rho)] dr."""
    rl, rr = spec.rho_l, spec.rho_r
    if rl == rr:
        return np.zeros(np.broadcast(np.asarray(rho), np.asarray(xi)).shape) if np.ndim(rho) or np.ndim(xi) else 0.0
    hp, f, g = em.hprime, em.f, em.g
    A = (hp(rr) * f(rr) - g(rr)) - (hp(rl) * f(rl) - g(rl))
    B = hp(rr) - hp(rl)
    C = em.k(rr) - em.k(rl)
    rho = np.asarray(rho, dtype=float)
    xi = np.asarray(xi, dtype=float)
    out = A - (f(rho) - xi * rho) * B - xi * C
    return out if out.ndim else float(out)


def sigma_quad(em, rho, xi, spec):
    from scipy.integrate import quad
    rl, rr = spec.rho_l, spec.rho_r
    val, _ = quad(lambda r: float(em.hsecond(r)) * (float(em.f(em.phi(r))) - float(em.f(rho))
                                                    - xi * (float(em.phi(r)) - rho)),
                  rl, rr, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


# boundary specs and stationary states --------------------------------------

@dataclass(frozen=True)
class BoundarySpec:
    rho_l: float
    rho_r: float
    phase: str

    @property
    def shock_regime(self):
        return self.rho_l < self.rho_r


def classify(em, rho_l, rho_r):
    K = em.capacity
    if not (0.0 < rho_l < K and 0.0 < rho_r < K):
        raise DomainError("boundary data must lie in the open interval (0, K)")
    f, rs = em.f, em.rho_star
    fl, fr = float(f(rho_l)), float(f(rho_r))
    tol = 1e-12 * em.flux.fmax
    if rho_l < rho_r:
        if abs(fl - fr) <= tol:
            phase = "COEX"
        else:
            phase = "LD" if fl < fr else "HD"
    elif rho_l >= rs >= rho_r:
        phase = "MC"
    elif rho_l < rs:
        phase = "LD"
    else:
        phase = "HD"
    return BoundarySpec(float(rho_l), float(rho_r), phase)


def make_spec(em, rho_l, rho_r):
    return classify(em, rho_l, rho_r)


def rho_critical(em, spec):
    rl, rr = spec.rho_l, spec.rho_r
    if rl == rr:
        raise DomainError("rho_c is undefined when rho_l = rho_r")
    if abs(rr - rl) < 1e-7:
        # the difference quotient tends to k'/h'' = phi
        return float(em.phi(0.5 * (rl + rr)))
    return float((em.k(rr) - em.k(rl)) / (em.hprime(rr) - em.hprime(rl)))


@dataclass(frozen=True)
class StationarySet:
    """Either a single constant profile or the coexistence family rho_l|rho_r at y."""
    phase: str
    value: float | None
    rho_l: float
    rho_r: float

    @property
    def is_family(self):
        return self.value is None

    def profile(self, n_cells, y=0.0):
        if self.value is not None:
            return np.full(n_cells, self.value)
        return shock_profile(self.rho_l, self.rho_r, y, n_cells)

    def distance(self, values):
        """L1 distance of a cell profile to the set."""
        values = np.asarray(values, dtype=float)
        n = values.size
        dx = 1.0 / n
        if self.value is not None:
            return float(dx * np.sum(np.abs(values - self.value)))
        # best cut position y for the step family, searched over cell edges
        a = np.abs(values - self.rho_l)
        b = np.abs(values - self.rho_r)
        ca = np.concatenate([[0.0], np.cumsum(a)])
        cb = np.concatenate([np.cumsum(b[::-1])[::-1], [0.0]])
        return float(dx * np.min(ca + cb))


def shock_profile(rho_l, rho_r, y, n_cells):
    """Cell averages of rho_l 1_(0,y) + rho_r 1_(y,1)."""
    edges = np.linspace(0.0, 1.0, n_cells + 1)
    frac = np.clip((y - edges[:-1]) * n_cells, 0.0, 1.0)
    return rho_l * frac + rho_r * (1 - frac)


def stationary_set(em, spec):
    if spec.phase == "COEX":
        return StationarySet("COEX", None, spec.rho_l, spec.rho_r)
    val = {"LD": spec.rho_l, "HD": spec.rho_r, "MC": em.rho_star}[spec.phase]
    return StationarySet(spec.phase, float(val), spec.rho_l, spec.rho_r)
