"""One-dimensional model ODE in p-polar (Prüfer) variables.

The model equation

    (p-1)|w'|^(p-2) w'' - kappa t |w'|^(p-2) w' + lambda |w|^(p-2) w = 0

is integrated through ``alpha w = r sin_p(theta)``, ``w' = r cos_p(theta)``
with ``alpha = (lambda/(p-1))^(1/p)``:

    theta'  = alpha - kappa t/(p-1) * cos_p^(p-1)(theta) sin_p(theta)
    (log r)' = kappa t/(p-1) * |cos_p(theta)|^p

Both right-hand sides are globally Lipschitz in theta, so the degenerate
coefficient ``|w'|^(p-2)`` of the original equation never appears.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .errors import NoStationaryPoint, StepSizeUnderflow, ValidationError
from .ptrig import _trig, check_p, constants, sincos_p

# Dormand-Prince 5(4) with Shampine's 4th-order continuous extension
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

DEFAULT_TOL = 1e-12
MIN_TOL = 1e-13

STATUS_DONE = 0
STATUS_EVENT = 1
STATUS_UNDERFLOW = -1
STATUS_BUDGET = -2


@dataclass(frozen=True)
class ModelParams:
    """Exponent, curvature bound and candidate eigenvalue of the model ODE."""

    p: float
    kappa: float
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_p(self.p))
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "lam", float(self.lam))
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValidationError(f"lambda must be positive and finite, got {self.lam!r}")
        if not math.isfinite(self.kappa):
            raise ValidationError("kappa must be finite")

    @property
    def alpha(self):
        return (self.lam / (self.p - 1.0)) ** (1.0 / self.p)

    @property
    def pi_p(self):
        return constants(self.p).pi_p


def prufer_rhs(t, theta, params):
    """``(theta', (log r)')`` of the phase system at ``(t, theta)``."""
    c = constants(params.p)
    return _rhs(float(t), float(theta), c.p, params.alpha,
                params.kappa / (c.p - 1.0), c.pi_p, c.u_split)


@njit(cache=True)
def _rhs(t, th, p, alpha, kq, pp, u_split):
    s, c, sp, cp, cpm1 = _trig(th, p, pp, u_split)
    kt = kq * t
    return alpha - kt * cpm1 * s, kt * cp


@njit(cache=True)
def _dense_eval(sigma, h, y0, k, P):
    out0 = y0[0]
    out1 = y0[1]
    s1 = sigma
    s2 = s1 * sigma
    s3 = s2 * sigma
    s4 = s3 * sigma
    for j in range(7):
        q = P[j, 0] * s1 + P[j, 1] * s2 + P[j, 2] * s3 + P[j, 3] * s4
        out0 += h * k[j, 0] * q
        out1 += h * k[j, 1] * q
    return out0, out1


@njit(cache=True)
def _dopri5(t0, t1, th0, lr0, p, alpha, kq, pp, u_split,
            rtol, atol, h_max, use_event, event_theta, event_tol, max_steps,
            C, A, B, E, P):
    direction = 1.0 if t1 >= t0 else -1.0
    cap = 256
    ts = np.empty(cap)
    hs = np.empty(cap)
    ys = np.empty((cap, 2))
    ks = np.empty((cap, 7, 2))
    ts[0] = t0
    ys[0, 0] = th0
    ys[0, 1] = lr0
    n = 1

    t = t0
    y = np.array([th0, lr0])
    k = np.empty((7, 2))
    f0, f1 = _rhs(t, y[0], p, alpha, kq, pp, u_split)
    k[0, 0] = f0
    k[0, 1] = f1
    span = abs(t1 - t0)
    h = min(h_max, span)
    # local error ~ (h |f|)^5: start where that is about the tolerance
    fn = max(abs(f0) / (atol + rtol * abs(y[0])), abs(f1) / (atol + rtol * abs(y[1])))
    if fn > 0:
        h = min(h, 0.1 * (1.0 / fn) ** 0.2)
    status = STATUS_DONE
    t_event = np.nan
    rejected = False
    steps = 0
    ynew = np.empty(2)
    ystage = np.empty(2)
    while direction * (t1 - t) > 0:
        if h > h_max:
            h = h_max
        if h > abs(t1 - t):
            h = abs(t1 - t)
        if h < 10.0 * 2.2e-16 * max(1.0, abs(t)):
            status = STATUS_UNDERFLOW
            break
        if steps >= max_steps:
            status = STATUS_BUDGET
            break
        steps += 1
        hd = direction * h
        for i in range(1, 6):
            ystage[0] = y[0]
            ystage[1] = y[1]
            for j in range(i):
                ystage[0] += hd * A[i, j] * k[j, 0]
                ystage[1] += hd * A[i, j] * k[j, 1]
            g0, g1 = _rhs(t + C[i] * hd, ystage[0], p, alpha, kq, pp, u_split)
            k[i, 0] = g0
            k[i, 1] = g1
        ynew[0] = y[0]
        ynew[1] = y[1]
        for j in range(6):
            ynew[0] += hd * B[j] * k[j, 0]
            ynew[1] += hd * B[j] * k[j, 1]
        tnew = t + hd
        if direction * (tnew - t1) > 0:
            tnew = t1
        g0, g1 = _rhs(tnew, ynew[0], p, alpha, kq, pp, u_split)
        k[6, 0] = g0
        k[6, 1] = g1
        err = 0.0
        for c in range(2):
            e = 0.0
            for j in range(7):
                e += hd * E[j] * k[j, c]
            sc = atol + rtol * max(abs(y[c]), abs(ynew[c]))
            err += (e / sc) ** 2
        err = math.sqrt(0.5 * err)
        if err <= 1.0:
            if n + 1 >= cap:
                cap *= 2
                ts2 = np.empty(cap)
                hs2 = np.empty(cap)
                ys2 = np.empty((cap, 2))
                ks2 = np.empty((cap, 7, 2))
                ts2[:n] = ts[:n]
                hs2[:n] = hs[:n]
                ys2[:n] = ys[:n]
                ks2[:n] = ks[:n]
                ts, hs, ys, ks = ts2, hs2, ys2, ks2
            hs[n - 1] = hd
            ks[n - 1] = k
            crossed = False
            if use_event:
                g_old = y[0] - event_theta
                g_new = ynew[0] - event_theta
                crossed = g_old < 0.0 and g_new >= 0.0
            if crossed:
                lo = 0.0
                hi = 1.0
                while abs(hd) * (hi - lo) > event_tol:
                    mid = 0.5 * (lo + hi)
                    th_mid, _ = _dense_eval(mid, hd, y, k, P)
                    if th_mid >= event_theta:
                        hi = mid
                    else:
                        lo = mid
                sig = hi
                te = t + sig * hd
                the, lre = _dense_eval(sig, hd, y, k, P)
                ts[n] = te
                ys[n, 0] = event_theta
                ys[n, 1] = lre
                n += 1
                t_event = te
                status = STATUS_EVENT
                break
            ts[n] = tnew
            ys[n, 0] = ynew[0]
            ys[n, 1] = ynew[1]
            n += 1
            t = tnew
            y[0] = ynew[0]
            y[1] = ynew[1]
            k[0, 0] = k[6, 0]
            k[0, 1] = k[6, 1]
            if err == 0.0:
                factor = 5.0
            else:
                factor = min(5.0, 0.9 * err ** -0.2)
            if rejected:
                factor = min(1.0, factor)
            h *= factor
            rejected = False
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            rejected = True
    return n, ts[:n].copy(), hs[:max(n - 1, 0)].copy(), ys[:n].copy(), ks[:max(n - 1, 0)].copy(), status, t_event


@dataclass
class PruferTrajectory:
    """Accepted steps of the phase system with dense output between them."""

    t_grid: np.ndarray
    theta: np.ndarray
    log_r: np.ndarray
    params: ModelParams
    event_time: float = math.nan
    _h: np.ndarray = field(default=None, repr=False)
    _k: np.ndarray = field(default=None, repr=False)

    @property
    def r(self):
        return np.exp(self.log_r)

    def __call__(self, t):
        """Dense output ``(theta(t), log r(t))`` for t inside the integrated span."""
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        ts = self.t_grid
        if len(ts) < 2:
            th = np.full(flat.shape, self.theta[0])
            lr = np.full(flat.shape, self.log_r[0])
            return th.reshape(t.shape), lr.reshape(t.shape)
        direction = 1.0 if ts[-1] >= ts[0] else -1.0
        lo, hi = sorted((ts[0], ts[-1]))
        span = hi - lo
        if np.any(flat < lo - 1e-12 * max(1.0, span)) or np.any(flat > hi + 1e-12 * max(1.0, span)):
            raise ValidationError("dense output requested outside the integrated interval")
        idx = np.searchsorted(direction * ts, direction * flat, side="right") - 1
        idx = np.clip(idx, 0, len(ts) - 2)
        h = self._h[idx]
        sigma = (flat - ts[idx]) / h
        powers = np.stack([sigma, sigma ** 2, sigma ** 3, sigma ** 4], axis=-1)
        q = powers @ _P.T  # (m, 7)
        incr = np.einsum("mj,mjc->mc", q, self._k[idx]) * h[:, None]
        th = self.theta[idx] + incr[:, 0]
        lr = self.log_r[idx] + incr[:, 1]
        # exact values at stored nodes (the event node is snapped onto the event phase)
        exact = np.searchsorted(direction * ts, direction * flat)
        exact = np.clip(exact, 0, len(ts) - 1)
        hit = ts[exact] == flat
        th[hit] = self.theta[exact[hit]]
        lr[hit] = self.log_r[exact[hit]]
        return th.reshape(t.shape), lr.reshape(t.shape)


def _max_step(params, t0, t1):
    # |theta'| <= alpha + |kappa| |t|/(p-1): keep each accepted step under pi_p/4 in phase
    tmax = max(abs(t0), abs(t1))
    bound = params.alpha + abs(params.kappa) * tmax / (params.p - 1.0)
    return 0.9 * (params.pi_p / 4.0) / bound


def integrate_prufer(params, t0, theta0, logr0, t1, tol=DEFAULT_TOL, event=None,
                     event_tol=1e-12, max_steps=2_000_000):
    """Adaptive Dormand-Prince 5(4) integration of the phase system.

    ``event``: optional phase value; integration stops at the first upward
    crossing ``theta = event``, located by bisection on the dense output to
    ``event_tol`` in t. The returned trajectory then ends at the event time.
    """
    if tol < MIN_TOL:
        raise ValidationError(f"tol must be >= {MIN_TOL}")
    c = constants(params.p)
    if t0 == t1:
        return PruferTrajectory(np.array([t0]), np.array([theta0]), np.array([logr0]), params,
                                _h=np.empty(0), _k=np.empty((0, 7, 2)))
    n, ts, hs, ys, ks, status, t_event = _dopri5(
        float(t0), float(t1), float(theta0), float(logr0),
        c.p, params.alpha, params.kappa / (c.p - 1.0), c.pi_p, c.u_split,
        tol, tol, _max_step(params, t0, t1),
        event is not None, float(event) if event is not None else 0.0, event_tol, max_steps,
        _C, _A, _B, _E, _P)
    if status == STATUS_UNDERFLOW:
        raise StepSizeUnderflow(f"step size underflow near t={ts[-1]!r} for {params}")
    if status == STATUS_BUDGET:
        raise StepSizeUnderflow(f"step budget of {max_steps} exhausted near t={ts[-1]!r} for {params}")
    return PruferTrajectory(ts, ys[:, 0].copy(), ys[:, 1].copy(), params,
                            event_time=float(t_event), _h=hs, _k=ks)


@dataclass
class ModelSolution:
    """Samples of a model solution plus its shooting quantities.

    ``b_of_a``, ``m_of_a`` and ``delta_of_a`` are set for cap-start solutions
    (``w(a) = -1, w'(a) = 0``) and ``None`` for odd solutions.
    """

    t_grid: np.ndarray
    w: np.ndarray
    w_prime: np.ndarray
    theta: np.ndarray
    log_r: np.ndarray
    params: ModelParams
    a: float
    b_of_a: float = None
    m_of_a: float = None
    delta_of_a: float = None
    trajectory: PruferTrajectory = field(default=None, repr=False)
    log_scale: float = 0.0
    odd: bool = False

    def evaluate(self, t):
        """``(w(t), w'(t))`` from the dense output."""
        t = np.asarray(t, dtype=float)
        if self.odd:
            th, lr = self.trajectory(np.abs(t))
            th = np.sign(t) * th
        else:
            th, lr = self.trajectory(t)
        return _reconstruct(th, lr + self.log_scale, self.params)

    def to_rows(self):
        return np.column_stack([self.t_grid, self.theta, self.log_r, self.w, self.w_prime])


def _reconstruct(theta, log_r, params):
    s, c = sincos_p(theta, params.p)
    r = np.exp(log_r)
    return r * s / params.alpha, r * c


def _sample_grid(a, b, n):
    # clustered at both ends, where w' vanishes like a fractional power
    k = np.arange(n)
    t = a + (b - a) * 0.5 * (1.0 - np.cos(np.pi * k / (n - 1)))
    t[0], t[-1] = a, b
    return t


def default_cap_end(params, a):
    return a + 10.0 * max(params.pi_p / params.alpha, abs(a))


def solve_ivp_cap(params, a, t_end=None, n_samples=2001, tol=DEFAULT_TOL):
    """Model solution with ``w(a) = -1, w'(a) = 0`` on ``[a, b(a)]``.

    Starts from ``theta(a) = -pi_p/2``, ``r(a) = alpha`` and stops at the first
    ``t > a`` with ``theta(t) = pi_p/2``. Raises :class:`NoStationaryPoint`
    when that does not happen before ``t_end`` (``b(a) = inf``).
    """
    half = 0.5 * params.pi_p
    if t_end is None:
        t_end = default_cap_end(params, a)
    traj = integrate_prufer(params, a, -half, math.log(params.alpha), t_end, tol, event=half)
    if not math.isfinite(traj.event_time):
        raise NoStationaryPoint(f"theta does not reach pi_p/2 on [{a}, {t_end}] for {params}")
    b = traj.event_time
    t = _sample_grid(a, b, n_samples)
    th, lr = traj(t)
    th[0], lr[0] = -half, math.log(params.alpha)
    th[-1], lr[-1] = half, traj.log_r[-1]
    w, wp = _reconstruct(th, lr, params)
    w[0], wp[0] = -1.0, 0.0
    wp[-1] = 0.0
    m = math.exp(traj.log_r[-1]) / params.alpha
    w[-1] = m
    return ModelSolution(t, w, wp, th, lr, params, a=float(a), b_of_a=b, m_of_a=m,
                         delta_of_a=b - a, trajectory=traj)


def solve_ivp_odd(params, t_end, n_samples=2001, tol=DEFAULT_TOL):
    """Odd model solution with ``w(0) = 0, w'(0) = 1`` sampled on ``[-t_end, t_end]``."""
    if not t_end > 0:
        raise ValidationError("t_end must be positive")
    traj = integrate_prufer(params, 0.0, 0.0, 0.0, t_end, tol)
    half = np.linspace(0.0, t_end, (n_samples + 1) // 2 + (n_samples + 1) % 2)
    # mirrored grid so that the symmetry holds bit for bit
    t = np.concatenate([-half[:0:-1], half])
    th, lr = traj(np.abs(t))
    th = np.sign(t) * th
    w, wp = _reconstruct(th, lr, params)
    return ModelSolution(t, w, wp, th, lr, params, a=-float(t_end), trajectory=traj, odd=True)


def scale_solution(sol, c):
    """Multiply a model solution by ``c > 0``; the model ODE is (p-1)-homogeneous."""
    if not c > 0:
        raise ValidationError("scale factor must be positive")
    lc = math.log(c)
    return replace(
        sol,
        w=c * sol.w,
        w_prime=c * sol.w_prime,
        log_r=sol.log_r + lc,
        m_of_a=None if sol.m_of_a is None else c * sol.m_of_a,
        log_scale=sol.log_scale + lc,
    )
