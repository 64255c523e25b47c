"""The static functional S in both regimes, minimizer sets and truncated hulls."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import Profile, as_values
from .model import DomainError, rho_critical


class RegimeError(ValueError):
    pass


def _edges(n):
    return np.linspace(0.0, 1.0, n + 1)


def _cumulative(values):
    return np.concatenate([[0.0], np.cumsum(values) / values.size])


# shock regime ----------------------------------------------------------------

def _shock_integrands(em, rho, spec):
    rl, rr = spec.rho_l, spec.rho_r
    hr = em.h(rho)
    a = hr - rho * float(em.hprime(rl)) + float(em.k(rl))
    b = hr - rho * float(em.hprime(rr)) + float(em.k(rr))
    return a, b


def S_shock_knots(em, rho, spec):
    """S[rho, y] at the cell edges y = i/n (S is affine in y inside each cell)."""
    if not spec.rho_l < spec.rho_r:
        raise RegimeError("the shock functional needs rho_l < rho_r")
    v = as_values(rho)
    a, b = _shock_integrands(em, v, spec)
    n = v.size
    A = np.concatenate([[0.0], np.cumsum(a)]) / n
    B = np.concatenate([np.cumsum(b[::-1])[::-1], [0.0]]) / n
    return A + B


def S_shock(em, rho, y, spec):
    vals = S_shock_knots(em, rho, spec)
    n = vals.size - 1
    return float(np.interp(y, _edges(n), vals))


@dataclass(frozen=True)
class ShockMin:
    value: float
    knots: np.ndarray  # cell-edge positions attaining the minimum (within 1e-9)
    intervals: list  # maximal runs of consecutive minimizing edges, as (y0, y1)

    @property
    def y(self):
        """Leftmost minimizer."""
        return float(self.knots[0])

    def contains(self, y, tol):
        return bool(np.any(np.abs(self.knots - y) <= tol))


def _runs(idx, n):
    out = []
    if idx.size == 0:
        return out
    start = prev = idx[0]
    for i in idx[1:]:
        if i != prev + 1:
            out.append((start / n, prev / n))
            start = i
        prev = i
    out.append((start / n, prev / n))
    return out


def S_shock_min(em, rho, spec, tol=1e-9):
    vals = S_shock_knots(em, rho, spec)
    n = vals.size - 1
    m = vals.min()
    idx = np.flatnonzero(vals <= m + tol)
    Kmin = min(float(em.Kfun(spec.rho_l)), float(em.Kfun(spec.rho_r)))
    return ShockMin(float(m - Kmin), idx / n, _runs(idx, n))


def cumulative_minimizers(em, rho, spec, tol=1e-9):
    """Minimizers of y -> int_0^y rho - rho_c y over the cell edges."""
    v = as_values(rho)
    n = v.size
    rc = rho_critical(em, spec)
    crit = _cumulative(v) - rc * _edges(n)
    idx = np.flatnonzero(crit <= crit.min() + tol)
    return idx / n


# truncated hulls ---------------------------------------------------------------

@dataclass(frozen=True)
class HullResult:
    knots: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    clamps: tuple


def _upper_hull_slopes(x, y):
    """Slopes of the least concave majorant on each interval [x_i, x_{i+1}]."""
    hull = []
    for i in range(x.size):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            # drop i1 if it lies on or below the chord from i0 to i
            if (y[i1] - y[i0]) * (x[i] - x[i0]) <= (y[i] - y[i0]) * (x[i1] - x[i0]):
                hull.pop()
            else:
                break
        hull.append(i)
    hull = np.array(hull)
    seg = np.diff(y[hull]) / np.diff(x[hull])
    owner = np.searchsorted(hull, np.arange(x.size - 1), side="right") - 1
    return seg[owner]


def truncated_concave_hull(R, alpha, beta, knots=None):
    """Least concave majorant of R with derivative clamped to [beta, alpha].

    R holds samples at uniform knots on [0, 1] (or the given knots).
    """
    if not alpha >= beta:
        raise ValueError("concave hull clamps need alpha >= beta")
    R = np.asarray(R, dtype=float)
    x = _edges(R.size - 1) if knots is None else np.asarray(knots, dtype=float)
    slopes = np.clip(_upper_hull_slopes(x, R), beta, alpha)
    base = np.concatenate([[0.0], np.cumsum(slopes * np.diff(x))])
    c = np.max(R - base)
    return HullResult(x, base + c, slopes, (float(alpha), float(beta)))


def truncated_convex_hull(R, alpha, beta, knots=None):
    """Greatest convex minorant of R with derivative clamped to [alpha, beta]."""
    if not alpha <= beta:
        raise ValueError("convex hull clamps need alpha <= beta")
    h = truncated_concave_hull(-np.asarray(R, dtype=float), -alpha, -beta, knots)
    return HullResult(h.knots, -h.values, -h.slopes, (float(alpha), float(beta)))


# rarefaction regime ------------------------------------------------------------

def tilde_G0(em, rho, spec):
    """Slopes of the truncated concave hull of the reversed cumulative profile."""
    v = as_values(rho)
    Rt = _cumulative(v[::-1])
    a, b = float(em.phi(spec.rho_r)), float(em.phi(spec.rho_l))
    return truncated_concave_hull(Rt, a, b).slopes


def optimal_F(em, rho, spec):
    if not spec.rho_l >= spec.rho_r:
        raise RegimeError("optimal F needs rho_l >= rho_r")
    G = tilde_G0(em, rho, spec)
    F = np.asarray(em.phi(G[::-1]), dtype=float)
    # guard against bisection round-off at the clamps
    F = np.clip(F, spec.rho_r, spec.rho_l)
    return Profile(np.minimum.accumulate(F))


def check_admissible_F(F, spec, tol=1e-12):
    F = as_values(F)
    if np.any(np.diff(F) > tol):
        raise ValueError("F must be nonincreasing")
    if F.max() > spec.rho_l + tol or F.min() < spec.rho_r - tol:
        raise ValueError("F must take values in [rho_r, rho_l]")


def _K_sup(em, spec):
    return float(em.Kfun(np.clip(em.rho_star, spec.rho_r, spec.rho_l)))


def S_rarefaction(em, rho, F, spec, check=True):
    """S[rho, F] minus sup of K over [rho_r, rho_l]."""
    if not spec.rho_l >= spec.rho_r:
        raise RegimeError("rarefaction functional needs rho_l >= rho_r")
    if check:
        check_admissible_F(F, spec)
    v, Fv = as_values(rho), as_values(F)
    dens = em.h(v) - v * em.hprime(Fv) + em.k(Fv)
    return float(np.mean(dens) - _K_sup(em, spec))


def S_rarefaction_batch(em, rho, Fs, spec):
    """S[rho, F] for the rows of Fs (no admissibility check)."""
    v = as_values(rho)
    Fs = np.asarray(Fs, dtype=float)
    hp, kk = em.hprime(Fs), em.k(Fs)
    return np.mean(em.h(v)[None, :] - v[None, :] * hp + kk, axis=1) - _K_sup(em, spec)


def S_rarefaction_sup(em, rho, spec):
    return S_rarefaction(em, rho, optimal_F(em, rho, spec), spec, check=False)


def optimal_F_ties(em, rho, spec, tol=1e-12):
    """Admissible one-cell moves of the jumps of optimal_F that leave S unchanged.

    A nonzero count means the maximizer is not unique at cell resolution.
    """
    F = optimal_F(em, rho, spec).values
    S0 = S_rarefaction(em, rho, F, spec, check=False)
    alts = []
    for i in np.flatnonzero(np.abs(np.diff(F)) > 1e-12):
        a, b = F.copy(), F.copy()
        a[i] = F[i + 1]
        b[i + 1] = F[i]
        alts += [a, b]
    if not alts:
        return 0
    return int(np.count_nonzero(np.abs(S_rarefaction_batch(em, rho, np.array(alts), spec) - S0) <= tol))


def quasi_potential_static(em, rho, spec):
    v = as_values(rho)
    if np.any(v < 0) or np.any(v > em.capacity):
        raise DomainError("profile outside [0, K]")
    if spec.rho_l < spec.rho_r:
        return S_shock_min(em, v, spec).value
    return S_rarefaction_sup(em, v, spec)


def random_admissible_F(rng, n_cells, spec, size, max_steps=8):
    """Random nonincreasing step functions with values in [rho_r, rho_l]."""
    out = np.empty((size, n_cells))
    for i in range(size):
        k = rng.integers(1, max_steps + 1)
        vals = np.sort(rng.uniform(spec.rho_r, spec.rho_l, k))[::-1]
        cuts = np.sort(rng.integers(0, n_cells + 1, k - 1))
        idx = np.searchsorted(cuts, np.arange(n_cells), side="right")
        out[i] = vals[idx]
    return out
