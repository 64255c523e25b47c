"""Cell-averaged profiles, space-time fields and exact wave diagrams."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp


class FieldError(ValueError):
    pass


def cell_centers(n):
    return (np.arange(n) + 0.5) / n


@dataclass(frozen=True)
class Profile:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise FieldError("a profile needs at least two cells")
        if not np.all(np.isfinite(v)):
            raise FieldError("profile has non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def n_cells(self):
        return self.values.size

    @property
    def dx(self):
        return 1.0 / self.values.size

    @property
    def x(self):
        return cell_centers(self.n_cells)

    def cumulative(self):
        """R at the cell edges 0, dx, ..., 1."""
        return np.concatenate([[0.0], np.cumsum(self.values) * self.dx])

    @classmethod
    def uniform(cls, value, n_cells):
        return cls(np.full(n_cells, float(value)))

    @classmethod
    def from_function(cls, fn, n_cells):
        return cls(np.asarray(fn(cell_centers(n_cells)), dtype=float))


def as_values(rho):
    return rho.values if isinstance(rho, Profile) else np.asarray(rho, dtype=float)


def l1_distance(a, b):
    a, b = as_values(a), as_values(b)
    if a.shape != b.shape:
        raise FieldError("profiles have different sizes")
    return float(np.sum(np.abs(a - b)) / a.size)


@dataclass
class SpaceTimeField:
    """frames[k] is the profile at time t0 + k dt."""
    frames: np.ndarray
    dt: float
    t0: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        fr = np.asarray(self.frames, dtype=float)
        if fr.ndim != 2 or fr.shape[1] < 2:
            raise FieldError("frames must be a 2d array with at least two cells")
        if not self.dt > 0:
            raise FieldError("dt must be positive")
        self.frames = fr

    @property
    def n_cells(self):
        return self.frames.shape[1]

    @property
    def n_frames(self):
        return self.frames.shape[0]

    @property
    def dx(self):
        return 1.0 / self.n_cells

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.n_frames)

    @property
    def t1(self):
        return self.t0 + self.dt * (self.n_frames - 1)

    def frame_at(self, t):
        k = int(round((t - self.t0) / self.dt))
        if k < 0 or k >= self.n_frames:
            raise FieldError(f"time {t} outside the field")
        return self.frames[k]

    def profile(self, k):
        return Profile(self.frames[k])

    def check_range(self, K, tol=1e-9):
        if self.frames.min() < -tol or self.frames.max() > K + tol:
            raise FieldError("field leaves [0, K]")

    def to_csv(self, fh=None):
        out = fh or io.StringIO()
        w = csv.writer(out)
        w.writerow(["t", "x", "rho"])
        x = cell_centers(self.n_cells)
        for t, row in zip(self.times, self.frames):
            for xi, r in zip(x, row):
                w.writerow([repr(float(t)), repr(float(xi)), repr(float(r))])
        return out.getvalue() if fh is None else None

    @classmethod
    def from_csv(cls, fh):
        text = fh.read() if hasattr(fh, "read") else fh
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["t", "x", "rho"]:
            raise FieldError("field CSV must start with the header t,x,rho")
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
        if data.size == 0:
            raise FieldError("empty field CSV")
        ts = np.unique(data[:, 0])
        n = int(np.sum(data[:, 0] == ts[0]))
        if data.shape[0] != n * ts.size:
            raise FieldError("ragged field CSV")
        order = np.lexsort((data[:, 1], data[:, 0]))
        frames = data[order, 2].reshape(ts.size, n)
        dt = float(ts[1] - ts[0]) if ts.size > 1 else 1.0
        return cls(frames, dt, float(ts[0]))


# wave diagrams ---------------------------------------------------------------

@dataclass(frozen=True)
class Line:
    x0: float
    t0: float
    slope: float

    def __call__(self, t):
        return self.x0 + self.slope * (np.asarray(t, dtype=float) - self.t0)

    def speed(self, t):
        return np.full(np.shape(t), self.slope, dtype=float)


@dataclass(frozen=True)
class OdeCurve:
    """Dense monotone-in-time samples of a curve, linearly interpolated."""
    ts: np.ndarray
    xs: np.ndarray
    dxs: np.ndarray

    def __call__(self, t):
        return np.interp(t, self.ts, self.xs)

    def speed(self, t):
        return np.interp(t, self.ts, self.dxs)

    @property
    def t_end(self):
        return float(self.ts[-1])


@dataclass(frozen=True)
class Clip:
    curve: object
    lo: float = 0.0
    hi: float = 1.0

    def __call__(self, t):
        return np.clip(self.curve(t), self.lo, self.hi)

    def speed(self, t):
        x = self.curve(t)
        inside = (x > self.lo) & (x < self.hi)
        return np.where(inside, self.curve.speed(t), 0.0)


def const_curve(x):
    return Line(float(x), 0.0, 0.0)


def ode_curve(rhs, t0, x0, t_max, stop_at=None, n_samples=4001):
    """Integrate dx/dt = rhs(t, x) from (t0, x0), stopping when x hits stop_at.

    Terminal events are located by the integrator's root finder (rtol 1e-12).
    """
    events = None
    if stop_at is not None:
        def ev(t, y):
            return y[0] - stop_at
        ev.terminal = True
        events = ev
    sol = solve_ivp(lambda t, y: [rhs(t, y[0])], (t0, t_max), [x0], method="DOP853",
                    rtol=1e-11, atol=1e-13, dense_output=True, events=events)
    t_end = sol.t[-1]
    if events is not None and sol.t_events[0].size:
        t_end = float(sol.t_events[0][0])
    ts = np.linspace(t0, t_end, n_samples)
    xs = sol.sol(ts)[0]
    if stop_at is not None and t_end < t_max:
        xs[-1] = stop_at
    dxs = np.array([rhs(t, x) for t, x in zip(ts, xs)])
    return OdeCurve(ts, xs, dxs)


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Fan:
    """Centered rarefaction: value (f')^{-1}((x - x0)/(t - t0))."""
    x0: float
    t0: float = 0.0


@dataclass(frozen=True)
class Region:
    t0: float
    t1: float
    left: object
    right: object
    content: object


@dataclass
class WaveDiagram:
    flux: object
    regions: list
    horizon: float = np.inf
    tau: float | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def _content_value(self, c, t, x):
        if isinstance(c, Const):
            return np.full(np.shape(x), c.value, dtype=float)
        s = (np.asarray(x) - c.x0) / max(t - c.t0, 1e-300)
        return np.asarray(self.flux.fprime_inv(s), dtype=float)

    def eval_many(self, t, x):
        x = np.asarray(x, dtype=float)
        if t < 0 or t > self.horizon:
            raise FieldError("time outside the diagram domain")
        out = np.full(x.shape, np.nan)
        todo = np.ones(x.shape, dtype=bool)
        for reg in self.regions:
            if not (reg.t0 <= t <= reg.t1):
                continue
            a, b = float(reg.left(t)), float(reg.right(t))
            if b <= a:
                continue
            m = todo & (x >= a) & (x <= b)
            if np.any(m):
                out[m] = self._content_value(reg.content, t, x[m])
                todo &= ~m
        if np.any(todo):
            raise FieldError("points outside the diagram domain")
        return out

    def __call__(self, t, x):
        return self.eval_many(t, x)


def eval_diagram(d, t, x):
    if np.ndim(x) == 0:
        if not (0.0 <= x <= 1.0):
            raise FieldError("position outside (0, 1)")
        return float(d.eval_many(t, np.array([x]))[0])
    return d.eval_many(t, x)


def rasterize(d, n_cells, dt, horizon, t0=0.0):
    n_t = int(round(horizon / dt)) + 1
    x = cell_centers(n_cells)
    frames = np.empty((n_t, n_cells))
    for k in range(n_t):
        frames[k] = d.eval_many(t0 + k * dt, x)
    return SpaceTimeField(frames, dt, t0)


def rh_violations(d, n_times=64, tol=1e-6):
    """Worst mismatch between curve speeds and Rankine-Hugoniot speeds.

    Every pair of regions sharing an interior boundary with different values
    on each side is checked at sampled times.
    """
    worst = 0.0
    regs = d.regions
    for i, A in enumerate(regs):
        for B in regs:
            if A is B:
                continue
            lo, hi = max(A.t0, B.t0), min(A.t1, B.t1, d.horizon if np.isfinite(d.horizon) else 50.0)
            if not hi > lo:
                continue
            ts = lo + (hi - lo) * (np.arange(n_times) + 0.5) / n_times
            for t in ts:
                xa, xb = float(A.right(t)), float(B.left(t))
                if abs(xa - xb) > 1e-12 or not (1e-9 < xa < 1 - 1e-9):
                    continue
                if float(A.right(t)) <= float(A.left(t)) or float(B.right(t)) <= float(B.left(t)):
                    continue
                ua = float(d._content_value(A.content, t, np.array([xa]))[0])
                ub = float(d._content_value(B.content, t, np.array([xa]))[0])
                if abs(ua - ub) < 1e-6:
                    continue
                v = float(d.flux.shock_speed(ua, ub))
                s = float(np.asarray(A.right.speed(np.array([t])))[0])
                worst = max(worst, abs(v - s))
    return worst
