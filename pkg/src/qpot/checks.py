"""Grid checks of the model invariants and of the boundary/shock inequalities.

Each suite returns a list of CheckResult; a suite passes when all entries do.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model as M


@dataclass
class CheckResult:
    name: str
    ok: bool
    value: float
    detail: str = ""

    def line(self):
        tag = "PASS" if self.ok else "FAIL"
        return f"{tag}  {self.name}: {self.value:.3e} {self.detail}".rstrip()


def interior_grid(em, n):
    return np.linspace(0.0, em.capacity, n + 2)[1:-1]


def _worst(name, err, tol):
    v = float(np.max(np.abs(err)))
    return CheckResult(name, v <= tol, v, f"(tol {tol:g})")


def involution_suite(em, n=1000, tol=1e-8):
    """phi involution, entropy symmetry, K-symmetry and evenness of j."""
    x = interior_grid(em, n)
    p = em.phi(x)
    out = [
        _worst("phi(phi(r)) = r", em.phi(p) - x, tol),
        _worst("f(phi(r)) = f(r)", em.f(p) - em.f(x), tol),
        _worst("h'(phi(r)) = -h'(r)", (em.hprime(p) + em.hprime(x)) / np.maximum(1.0, np.abs(em.hprime(x))), tol),
        _worst("K(phi(r)) = K(r)", em.Kfun(p) - em.Kfun(x), tol),
    ]
    hs = em.hsecond(x)
    sym = (hs + em.hsecond(p) * em.flux.phi_prime(x)) / np.maximum(1.0, hs)
    out.append(_worst("h''(r) = -h''(phi r) phi'(r)", sym, tol))
    theta = em.hprime(x[(x > 0.01 * em.capacity) & (x < 0.99 * em.capacity)])
    out.append(_worst("j(-theta) = j(theta)", em.chem_flux(-theta) - em.chem_flux(theta), tol))
    dec = np.all(np.diff(p) < 0)
    out.append(CheckResult("phi decreasing", bool(dec), 0.0))
    return out


ROUNDING = 1e-13


def _equality_match(name, gap, predicate, tol):
    """gap <= tol on the predicate set and gap > 0 (beyond rounding) off it.

    Near the edge of the set the gap vanishes like a power of the distance,
    so grid points close to the edge can sit below tol without being equality
    points; strict positivity is what the characterization asserts there.
    """
    viol = float(max(0.0, -np.min(gap)))
    on = np.abs(gap[predicate]) <= tol
    off = gap[~predicate] > ROUNDING
    mismatch = int(np.count_nonzero(~on) + np.count_nonzero(~off))
    ok = viol <= tol and mismatch == 0
    return CheckResult(name, ok, viol, f"(equality mismatches {mismatch} of {gap.size})")


def _relative_flux_grid(em, r, r0):
    """g(r_i, r0_j) on the outer grid from one-dimensional evaluations."""
    g, f, hp = em.g, em.f, em.hprime
    return (g(r)[:, None] - g(r0)[None, :]) - hp(r0)[None, :] * (f(r)[:, None] - f(r0)[None, :])


def inequality_suite(em, specs, n=200, tol=1e-9):
    """Sign of pi, the sigma + pi bound, and the boundary-cost inequalities.

    Every item is checked on an n x n grid; equality sets are compared with
    their closed characterizations pointwise.
    """
    rs = em.rho_star
    x = interior_grid(em, n)
    xf = interior_grid(em, 2 * n)
    out = []
    # sign of pi against the order of the states
    A, B = np.meshgrid(x, x, indexing="ij")
    pi = M.pi_production(em, A, B)
    sgn_ok = np.all(np.sign(pi[A != B]) == np.sign((A - B)[A != B]))
    out.append(CheckResult("pi(a,b) < 0 iff a < b", bool(sgn_ok), float(np.min(np.abs(pi[A != B])))))
    # boundary costs against the relative flux, on (rho, datum) pairs only
    R, D = A, B
    il = M.boundary_cost_left(em, R, D)
    ir = M.boundary_cost_right(em, R, D)
    g = _relative_flux_grid(em, x, x)
    PD = em.phi(D)
    # equality holds on the admissible set of the opposite side
    e_plus = (np.abs(R - D) < 1e-14) | ((D <= rs) & (R >= PD - 1e-12)) | ((D > rs) & (R >= rs))
    e_minus = (np.abs(R - D) < 1e-14) | ((D <= rs) & (R <= rs)) | ((D > rs) & (R <= PD + 1e-12))
    out.append(_equality_match("i^l >= g", il - g, e_minus, tol))
    out.append(_equality_match("i^r >= -g", ir + g, e_plus, tol))
    for spec in specs:
        rl, rr = spec.rho_l, spec.rho_r
        tag = f"[{rl:g},{rr:g}]"
        pl, pr = float(em.phi(rl)), float(em.phi(rr))
        # shock production bound, grid enlarged with the equality point
        xs = np.unique(np.concatenate([x, [pl, pr]]))
        A, B = np.meshgrid(xs, xs, indexing="ij")
        m = A <= B
        a, b = A[m], B[m]
        v = em.flux.shock_speed(a, b)
        pi = M.pi_production(em, a, b)
        for side, r in (("-", a), ("+", b)):
            gap = -(M.sigma(em, r, v, spec) + pi)
            pred = (np.abs(a - pr) < 1e-14) & (np.abs(b - pl) < 1e-14)
            out.append(_equality_match(f"sigma(r{side},v)+pi <= 0 {tag}", gap, pred, tol))
        # production along characteristics
        s = M.sigma(em, x, em.flux.fprime(x), spec)
        out.append(CheckResult(f"sup sigma(r,f'(r)) < 0 {tag}", bool(np.max(s) < 0), float(np.max(s))))
        # right cost dominates -g for rho <= rho*, rho_l swept over (0, rho_r]
        r1, l1 = xf[xf <= rs], np.append(xf[xf < rr], rr)
        R, L = np.meshgrid(r1, l1, indexing="ij")
        gap = M.boundary_cost_right(em, r1, rr)[:, None] + _relative_flux_grid(em, r1, l1)
        pred = (em.f(L) <= em.f(rr) + 1e-15) & (np.abs(R - L) < 1e-14)
        out.append(_equality_match(f"-g(r,rho_l) <= i^r(r,rho_r) {tag}", gap, pred, tol))
        # left cost dominates g for rho >= rho*, rho_r swept over [rho_l, K)
        r1, q1 = xf[xf >= rs], np.append(rl, xf[xf > rl])
        R, Rr = np.meshgrid(r1, q1, indexing="ij")
        gap = M.boundary_cost_left(em, r1, rl)[:, None] - _relative_flux_grid(em, r1, q1)
        pred = (em.f(rl) >= em.f(Rr) - 1e-15) & (np.abs(R - Rr) < 1e-14)
        out.append(_equality_match(f"g(r,rho_r) <= i^l(r,rho_l) {tag}", gap, pred, tol))
    return out


def default_specs(em):
    """One LD, one HD and one coexistence spec for the model."""
    K = em.capacity
    a, b = 0.2 * K, min(0.6 * K, float(em.phi(0.2 * K)) - 0.1 * K)
    c, d = float(em.phi(0.8 * K)) + 0.1 * K, 0.8 * K
    e = 0.3 * K
    return [M.make_spec(em, a, b), M.make_spec(em, c, d), M.make_spec(em, e, float(em.phi(e)))]


def all_ok(results):
    return all(r.ok for r in results)


# random space-time fields ----------------------------------------------------

def field_corpus(em, rng, size=50, n_cells=64, horizon=0.5):
    """Mixed corpus: entropy solutions, their reversals, noisy and random fields.

    Returns a list of (kind, field, spec).
    """
    from .fields import SpaceTimeField
    from .paths import reverse
    from .solver import solve_ibvp

    K = em.capacity
    out = []
    kinds = ("entropy", "reversed", "noisy", "steps")
    for i in range(size):
        kind = kinds[i % len(kinds)]
        rl, rr = rng.uniform(0.05 * K, 0.95 * K, 2)
        spec = M.make_spec(em, rl, rr)
        k = rng.integers(1, 5)
        vals = rng.uniform(0.02 * K, 0.98 * K, k)
        cuts = np.sort(rng.uniform(0, 1, k - 1))
        u0 = vals[np.searchsorted(cuts, (np.arange(n_cells) + 0.5) / n_cells)]
        fld = solve_ibvp(em, u0, rl, rr, horizon)
        if kind == "reversed":
            fld = reverse(fld)
        elif kind == "noisy":
            noise = 0.05 * K * rng.standard_normal(fld.frames.shape)
            fld = SpaceTimeField(np.clip(fld.frames + noise, 0.0, K), fld.dt, fld.t0)
        elif kind == "steps":
            frames = np.repeat(u0[None, :], fld.n_frames, axis=0)
            jumps = rng.integers(0, fld.n_frames, 3)
            for j in jumps:
                frames[j:] = rng.uniform(0.02 * K, 0.98 * K)
            fld = SpaceTimeField(frames, fld.dt, fld.t0)
        out.append((kind, fld, spec))
    return out
