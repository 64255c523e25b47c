"""The dynamic functional I = I^l + I^0 + I^r on discrete space-time fields.

Entropy production is measured cell by cell with the Kruzkov family
    eta_v = (rho - v)^+ for v >= rho*,  eta_v = (v - rho)^+ for v < rho*,
whose superposition with weight h''(v) reproduces any entropy normalized at
rho*. The discrete residual in cell (n, i) is

    dx [eta(u_i^{n+1}) - eta(u_i^n)] + dt [Q_{i+1/2} - Q_{i-1/2}],

with Q the Godunov (upwind) numerical entropy flux of eta_v at level n and the
boundary cell's own flux at the two outer interfaces. The residual telescopes
over any block of cells, and fields produced by the Godunov scheme satisfy
the cell entropy inequality (residual <= 0) for every v.

The mirrored residual, -Phi(residual of the reversed field), is an equally
consistent estimate that uses the upwind flux of the time-reversed scheme;
it is exact for reversed Godunov fields. Each production mass is read from
the estimate with the smaller total, so that reversal swaps the two masses.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.ndimage import uniform_filter1d

from .model import boundary_cost_left, boundary_cost_right

N_V = 65
# positive parts are taken on blocks of BLOCK_T steps x BLOCK_X cells
BLOCK_T = 8
BLOCK_X = 8
# floor = FLOOR_C * (dx + dt); entropy solutions from random Riemann-type data
# reach 1.13 (dx + dt) at worst, mostly boundary cost of the initial transient
FLOOR_C = 1.5


def v_grid(em, n=N_V):
    """Chebyshev (first kind) nodes in (0, K) with trapezoid weights.

    The nodes are mapped piecewise linearly so that the middle node (n odd)
    sits at rho*, where the Kruzkov family switches branch.
    """
    K, rs = em.capacity, em.rho_star
    k = np.arange(1, n + 1)
    u = 0.5 * (1.0 - np.cos((2 * k - 1) * np.pi / (2 * n)))
    v = np.where(u <= 0.5, 2 * u * rs, rs + (2 * u - 1) * (K - rs))
    if n % 2:
        v[n // 2] = rs
    ext = np.concatenate([[0.0], v, [K]])
    w = 0.5 * (ext[2:] - ext[:-2])
    return v, w


def _branch(em, v):
    """+1 on the upper Kruzkov branch, -1 on the lower one, 0 at rho*."""
    return np.sign(np.asarray(v, dtype=float) - em.rho_star)


def kruzkov_pair(em, v, rho):
    """(eta_v(rho), q_v(rho)) broadcast over v (last axis) and rho.

    At v = rho* exactly the two branches are averaged, which keeps the
    trapezoid rule second order across the branch switch.
    """
    rho = np.asarray(rho, dtype=float)[..., None]
    v = np.asarray(v, dtype=float)
    s = _branch(em, v)
    D = rho - v
    FD = em.f(rho) - em.f(v)
    return 0.5 * (np.abs(D) + s * D), 0.5 * FD * (np.sign(D) + s)


@dataclass
class EntropyProductionEstimate:
    v_grid: np.ndarray
    weights: np.ndarray
    cell_residuals: np.ndarray  # (n_frames - 1, n_cells, n_v)


def _godunov_f(a, b, fa, fb, rs, fmax):
    """Godunov flux from precomputed f(a), f(b)."""
    return np.where(a <= b, np.minimum(fa, fb), np.where(b > rs, fb, np.where(a < rs, fa, fmax)))


def interface_fluxes(em, v, a, b, fa=None, fb=None):
    """Godunov numerical Kruzkov fluxes at interfaces with left/right states a, b.

    |rho - v| gets G(a v v, b v v) - G(a ^ v, b ^ v); the one-sided family is
    recovered by adding or subtracting the mass flux G(a, b) - f(v).
    """
    rs, fmax = em.rho_star, em.flux.fmax
    fa = em.f(a) if fa is None else fa
    fb = em.f(b) if fb is None else fb
    fv = em.f(v)
    G = _godunov_f(a, b, fa, fb, rs, fmax)[..., None]
    a, b, fa, fb = a[..., None], b[..., None], fa[..., None], fb[..., None]
    ua, ub = a > v, b > v
    qabs = (_godunov_f(np.where(ua, a, v), np.where(ub, b, v), np.where(ua, fa, fv), np.where(ub, fb, fv), rs, fmax)
            - _godunov_f(np.where(ua, v, a), np.where(ub, v, b), np.where(ua, fv, fa), np.where(ub, fv, fb), rs, fmax))
    return 0.5 * (qabs + _branch(em, v) * (G - fv))


def _residual_pair(em, blk, v, dx, dt, mirrored):
    """Forward residual of the steps in blk and, optionally, the mirrored one.

    The mirrored residual uses the interface fluxes of level n+1 with the two
    states swapped, which is the forward residual of the reversed field
    mapped back by (t, x) -> (-t, 1 - x).
    """
    eta, q = kruzkov_pair(em, v, blk)
    fb = em.f(blk)
    dE = dx * (eta[1:] - eta[:-1])

    def flux_div(lv, swap):
        u, fu = blk[lv], fb[lv]
        Q = np.empty((u.shape[0], blk.shape[1] + 1, v.size))
        if swap:
            Q[:, 1:-1] = interface_fluxes(em, v, u[:, 1:], u[:, :-1], fu[:, 1:], fu[:, :-1])
        else:
            Q[:, 1:-1] = interface_fluxes(em, v, u[:, :-1], u[:, 1:], fu[:, :-1], fu[:, 1:])
        # no exterior state is known, so boundary interfaces carry the cell's own flux
        Q[:, 0] = q[lv, 0]
        Q[:, -1] = q[lv, -1]
        return dt * (Q[:, 1:] - Q[:, :-1])

    Rf = dE + flux_div(slice(0, -1), False)
    if not mirrored:
        return Rf
    return Rf, dE + flux_div(slice(1, None), True)


def _chunk_bounds(n_rows, chunk=48):
    """Row ranges of about chunk rows whose ends fall on time-block starts."""
    starts = _symmetric_starts(n_rows, BLOCK_T)
    cuts = [0]
    for s in starts[1:]:
        if s - cuts[-1] >= chunk:
            cuts.append(int(s))
    cuts.append(n_rows)
    return [(a, b, starts[(starts >= a) & (starts < b)] - a) for a, b in zip(cuts[:-1], cuts[1:])]


def _residual_chunks(em, field, v, chunk=48, mirrored=False, with_starts=False):
    """Yields forward residuals, or (forward, mirrored) pairs."""
    fr = field.frames
    for a, b, loc in _chunk_bounds(fr.shape[0] - 1, chunk):
        pair = _residual_pair(em, fr[a:b + 1], v, field.dx, field.dt, mirrored)
        yield (pair, loc) if with_starts else pair


def entropy_production(em, field, v_grid_size=N_V):
    """Full residual array; memory grows as frames x cells x v, use on small fields."""
    v, w = v_grid(em, v_grid_size)
    res = np.concatenate(list(_residual_chunks(em, field, v)), axis=0)
    return EntropyProductionEstimate(v, w, res)


@dataclass
class ProductionSums:
    positive: float  # bulk action
    negative: float  # mass of the negative part
    j0: float
    sampled: dict  # smoothing radius -> interior sampled production


def _symmetric_starts(n, b):
    """Block starts: whole blocks from both ends, the remainder in the middle.

    The partition maps to itself under i -> n - 1 - i, so reversing a field
    permutes its blocks.
    """
    m = n // (2 * b)
    left = np.arange(m) * b
    right = n - (np.arange(m, 0, -1) * b)
    mid = [m * b] if n - 2 * m * b > 0 else []
    return np.concatenate([left, mid, right]).astype(int)


def block_sum(R, bt=None, bx=None, t_starts=None):
    """Sum residuals (T, n, V) over space-time blocks (reversal-symmetric partition).

    t_starts overrides the time partition, for chunks of a longer field.
    """
    bt = BLOCK_T if bt is None else bt
    bx = BLOCK_X if bx is None else bx
    if bt == 1 and bx == 1:
        return R
    T, n = R.shape[:2]
    it = _symmetric_starts(T, bt) if t_starts is None else t_starts
    out = np.add.reduceat(R, it, axis=0)
    return np.add.reduceat(out, _symmetric_starts(n, bx), axis=1)


def production_sums(em, field, radii=(), v_grid_size=N_V):
    """Positive and negative production masses from block-summed residuals.

    Godunov fields have nonpositive residual in every cell, so summing over
    blocks keeps them at zero, while the O(1) opposite-sign spill of a
    smeared discontinuity into neighbouring cells cancels inside a block.
    Both the forward and the mirrored residual are accumulated; block
    positive parts can only be inflated by leakage, so each mass is read from
    the estimate that gives the smaller total.
    """
    v, w = v_grid(em, v_grid_size)
    wh = w * em.hsecond(v)
    acc = [{"pos": 0.0, "neg": 0.0, "j0": 0.0, "s": {r: 0.0 for r in radii}} for _ in range(2)]
    for pair, loc in _residual_chunks(em, field, v, mirrored=True, with_starts=True):
        for a, R in zip(acc, pair):
            R = block_sum(R, t_starts=loc)
            a["pos"] += float(np.sum(np.maximum(R, 0.0) @ wh))
            a["neg"] += float(np.sum(np.maximum(-R, 0.0) @ wh))
            a["j0"] += float(np.sum(np.maximum(R @ wh, 0.0)))
            if radii:
                ind = (R > 0).astype(float)
                for r in radii:
                    a["s"][r] += float(np.sum((_smooth(ind, r, axis=1) * R) @ wh))
    best = min(acc, key=lambda a: a["pos"])
    return ProductionSums(best["pos"], min(a["neg"] for a in acc), best["j0"], best["s"])


def bulk_action(em, field):
    return production_sums(em, field).positive


def negative_mass(em, field):
    return production_sums(em, field).negative


def j0_action(em, field):
    """Positive part of the h-entropy production, cell by cell."""
    return production_sums(em, field).j0


def _time_quad(vals, dt):
    return float(dt * (0.5 * vals[0] + vals[1:-1].sum() + 0.5 * vals[-1])) if vals.size > 1 else 0.0


def boundary_action(em, field, spec):
    left = boundary_cost_left(em, field.frames[:, 0], spec.rho_l)
    right = boundary_cost_right(em, field.frames[:, -1], spec.rho_r)
    return _time_quad(np.asarray(left), field.dt), _time_quad(np.asarray(right), field.dt)


@dataclass
class ActionBreakdown:
    bulk: float
    left: float
    right: float
    total: float
    floor: float

    def as_dict(self):
        return asdict(self)


def discretization_floor(field):
    return FLOOR_C * (field.dx + field.dt)


def total_action(em, field, spec, sums=None):
    b = (sums or production_sums(em, field)).positive
    l, r = boundary_action(em, field, spec)
    return ActionBreakdown(b, l, r, b + l + r, discretization_floor(field))


# sampler lower bound -------------------------------------------------------

def _smooth(ind, radius, axis):
    """Moving average along axis (zero padded), values stay in [0, 1]."""
    if radius == 0:
        return ind
    return uniform_filter1d(ind, 2 * radius + 1, axis=axis, mode="constant")


def boundary_sampler_flux(em, u, ref, datum, side):
    """Flux at u of the optimal boundary entropy built for trace ref.

    eta'' = h'' 1[q_v(ref, datum) > 0] (left) or 1[-q_v(ref, datum) > 0] (right),
    normalized at the datum, so its flux equals i^l (resp. -i^r) when u = ref.
    """
    v, w = v_grid(em, 4 * N_V)
    u = np.asarray(u, dtype=float)[:, None]
    ref = np.asarray(ref, dtype=float)[:, None]

    def qv(x):
        lo, hi = np.minimum(x, datum), np.maximum(x, datum)
        inside = (v > lo) & (v < hi)
        return np.where(inside, np.sign(x - datum) * (em.f(x) - em.f(v)), 0.0)

    sel = qv(ref) > 0 if side == "left" else -qv(ref) > 0
    return (np.where(sel, qv(u), 0.0) * em.hsecond(v)) @ w


def _mollify_time(x, radius):
    if radius == 0:
        return x
    return uniform_filter1d(x, 2 * radius + 1, mode="nearest")


def sampler_bound(em, field, spec, sampler_family_size=64, return_all=False):
    """Max of the kinetic form of the sampled production over a finite family.

    Each member uses an interior weight psi in [0, 1] (a smoothed indicator of
    positive Kruzkov residual) and boundary entropies built from time-mollified
    traces. The zero sampler is always included. Every member is bounded by the
    total action, so the maximum is a lower bound for it.
    """
    tr0, tr1 = field.frames[:, 0], field.frames[:, -1]
    vals = [0.0]
    m = max(1, sampler_family_size - 1)
    radii = [(r % 8, r // 8) for r in range(m)]
    sums = production_sums(em, field, radii=sorted({r for r, _ in radii}))
    for rs, rt in radii:
        interior = sums.sampled[rs]
        ref0 = _mollify_time(tr0, rt)
        ref1 = _mollify_time(tr1, rt)
        g0 = boundary_sampler_flux(em, tr0, ref0, spec.rho_l, "left")
        g1 = boundary_sampler_flux(em, tr1, ref1, spec.rho_r, "right")
        vals.append(interior + _time_quad(g0 - g1, field.dt))
    return (max(vals), vals) if return_all else max(vals)
