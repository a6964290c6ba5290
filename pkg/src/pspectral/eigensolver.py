"""mu_p(kappa, D), lambda_0, the symmetric half-length a_bar and matched models.

The first nonzero Neumann eigenvalue of the model on ``[-D/2, D/2]`` is the
``lambda`` whose odd solution first becomes stationary at ``t = D/2``; the
half-length ``a_bar(lambda)`` of that solution is strictly decreasing in
``lambda``, so the eigenvalue is found by bisection on the predicate
``a_bar(lambda) <= D/2``.
"""

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import (
    BracketFailure,
    NoCrossing,
    NoStationaryPoint,
    RangeMismatch,
    RangeUnreachable,
    RangeUnreachableWarning,
    ValidationError,
)
from .ode_model import ModelParams, integrate_prufer, solve_ivp_cap
from .ptrig import check_p, pi_p

DEFAULT_TOL = 1e-10
LAMBDA_MAX = 1e12


@dataclass(frozen=True)
class EigenResult:
    """Model eigenvalue for one ``(p, kappa, D)``.

    ``residual`` is ``|2 a_bar - D|`` at the reported ``lam``; for
    ``kappa = 0`` the closed form is exact and the residual is zero.
    """

    lam: float
    p: float
    kappa: float
    D: float
    a_bar: float
    residual: float
    iterations: int
    tol: float = DEFAULT_TOL

    @property
    def params_echo(self):
        return (self.p, self.kappa, self.D)

    def to_dict(self):
        return {
            "p": self.p,
            "kappa": self.kappa,
            "D": self.D,
            "lambda": self.lam,
            "a_bar": self.a_bar,
            "residual": self.residual,
            "iterations": self.iterations,
            "tol": self.tol,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def closed_form(p, D):
    """``(p-1) (pi_p/D)^p``, the eigenvalue when kappa = 0."""
    return (p - 1.0) * (pi_p(p) / D) ** p


def _ode_tol(tol):
    return min(max(0.01 * tol, 1e-13), 1e-11)


def _half_crossing(p, kappa, lam, t_max, ode_tol):
    """First t in (0, t_max] with theta = pi_p/2 on the odd solution, or None."""
    params = ModelParams(p, kappa, lam)
    traj = integrate_prufer(params, 0.0, 0.0, 0.0, t_max, ode_tol, event=0.5 * params.pi_p)
    te = traj.event_time
    return te if math.isfinite(te) else None


def default_t_max(p, kappa, lam):
    alpha = (lam / (p - 1.0)) ** (1.0 / p)
    t = 10.0 * pi_p(p) / alpha
    if kappa > 0:
        t += 10.0 / math.sqrt(kappa)
    return t


def delta_bar(p, kappa, lam, tol=DEFAULT_TOL, t_max=None):
    """Length ``2 a_bar`` of the symmetric model interval for eigenvalue ``lam``.

    Raises :class:`NoCrossing` when the odd solution stays increasing up to
    ``t_max`` (this is the case for ``lam <= lambda_0`` when kappa > 0).
    """
    p = check_p(p)
    if t_max is None:
        t_max = default_t_max(p, kappa, lam)
    a = _half_crossing(p, float(kappa), float(lam), float(t_max), _ode_tol(tol))
    if a is None:
        raise NoCrossing(f"odd solution has no stationary point on (0, {t_max}] for p={p}, kappa={kappa}, lambda={lam}")
    return 2.0 * a


def _check_D(D):
    D = float(D)
    if not (D > 0 and math.isfinite(D)):
        raise ValidationError(f"D must be positive and finite, got {D!r}")
    return D


def mu_p(p, kappa, D, tol=DEFAULT_TOL, _force_shooting=False):
    """First nonzero Neumann eigenvalue ``mu_p(kappa, D)`` of the model on ``[-D/2, D/2]``."""
    p = check_p(p)
    kappa = float(kappa)
    D = _check_D(D)
    if not (tol > 0):
        raise ValidationError("tol must be positive")
    if not math.isfinite(kappa):
        raise ValidationError("kappa must be finite")
    if kappa == 0.0 and not _force_shooting:
        return EigenResult(closed_form(p, D), p, kappa, D, 0.5 * D, 0.0, 0, tol)

    half = 0.5 * D
    otol = _ode_tol(tol)
    cache = {}

    def crossing(lam):
        if lam not in cache:
            cache[lam] = _half_crossing(p, kappa, lam, half, otol)
        return cache[lam]

    # lower end: far below any candidate; the exponential absorbs the weight's distortion
    lo = (p - 1.0) * (pi_p(p) / (2.0 * D)) ** p * math.exp(-min(abs(kappa) * D * D, 700.0))
    while crossing(lo) is not None:
        lo *= 0.25
        if lo < 1e-300:
            raise BracketFailure(f"no lower bracket for p={p}, kappa={kappa}, D={D}")
    hi = max(2.0 * lo, closed_form(p, D))
    while hi <= LAMBDA_MAX and crossing(hi) is None:
        lo = hi
        hi *= 2.0
    if hi > LAMBDA_MAX:
        raise BracketFailure(f"upper bracket exceeded {LAMBDA_MAX:g} for p={p}, kappa={kappa}, D={D}")

    iterations = 0
    while True:
        residual = D - 2.0 * crossing(hi)
        if hi - lo < tol * hi and residual < tol:
            break
        mid = math.sqrt(lo * hi) if hi > 4.0 * lo else 0.5 * (lo + hi)
        if not lo < mid < hi:
            break  # floating resolution
        iterations += 1
        if crossing(mid) is None:
            lo = mid
        else:
            hi = mid
    a_bar = crossing(hi)
    return EigenResult(hi, p, kappa, D, a_bar, abs(D - 2.0 * a_bar), iterations, tol)


def lambda0(p, kappa, tol=1e-8, max_doublings=6):
    """First nonzero eigenvalue of the model on the whole line.

    Zero for kappa <= 0. For kappa > 0 it is the decreasing limit of
    ``mu_p(p, kappa, D)`` as D grows; D runs through ``4 * 2^k / sqrt(kappa)``
    until successive values agree to ``tol`` (relative once above 1).
    """
    p = check_p(p)
    kappa = float(kappa)
    if kappa <= 0:
        return 0.0
    scale = 1.0 / math.sqrt(kappa)
    inner = min(0.01 * tol, 1e-10)
    prev = mu_p(p, kappa, 4.0 * scale, inner).lam
    for k in range(1, max_doublings + 1):
        cur = mu_p(p, kappa, 4.0 * 2 ** k * scale, inner).lam
        if abs(prev - cur) < tol * max(1.0, cur):
            return cur
        prev = cur
    return prev


def _m_of_a(params, a, tol):
    try:
        return solve_ivp_cap(params, a, n_samples=2, tol=tol).m_of_a
    except NoStationaryPoint:
        return 0.0


def model_for_range(p, kappa, lam, u_max, tol=1e-10):
    """Cap-start model solution on ``[a, b(a)]`` whose maximum ``m(a)`` equals ``u_max``.

    For kappa > 0, ``m`` decreases from 1 at ``a = -a_bar`` to 0 as
    ``a -> -inf``. For kappa < 0 the same range is covered on the other side
    of ``-a_bar``. For kappa = 0 the model is translation invariant and
    ``m = 1``; the symmetric model is returned and a
    :class:`RangeUnreachableWarning` is emitted when ``u_max`` differs from 1.
    """
    p = check_p(p)
    kappa = float(kappa)
    u_max = float(u_max)
    if not (0.0 < u_max <= 1.0 + tol):
        raise ValidationError(f"u_max must lie in (0, 1], got {u_max!r}")
    params = ModelParams(p, kappa, lam)
    otol = _ode_tol(tol)
    a_bar = 0.5 * delta_bar(p, kappa, lam, tol)
    a_sym = -a_bar
    if kappa == 0.0 or abs(u_max - 1.0) <= tol:
        if kappa == 0.0 and abs(u_max - 1.0) > tol:
            warnings.warn(f"kappa = 0: every model has maximum 1, u_max={u_max} unreachable",
                          RangeUnreachableWarning, stacklevel=2)
        return solve_ivp_cap(params, a_sym, tol=otol)

    direction = -1.0 if kappa > 0 else 1.0
    g = lambda a: _m_of_a(params, a, otol) - u_max
    inner = a_sym
    step = 1.0
    while True:
        outer = a_sym + direction * step
        if g(outer) < 0:
            break
        inner = outer
        step *= 2.0
        if step > 1e4:
            raise RangeUnreachable(f"m(a) stays above {u_max} for |a + a_bar| up to 1e4")
    lo, hi = sorted((inner, outer))
    a = brentq(g, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200)
    return solve_ivp_cap(params, a, tol=otol)


def check_gradient_comparison(t, u, du, model, range_tol=1e-9):
    """Largest ``|u'| - w'(w^{-1}(u))`` over the samples ``(t, u, u')``.

    ``w^{-1}`` comes from monotone cubic interpolation of ``w'`` as a function
    of ``w`` on the strictly increasing part of the model grid. Samples may
    overshoot the model range by ``range_tol`` (the accuracy of ``m(a)``);
    they are clipped onto it.
    """
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    w = np.asarray(model.w, dtype=float)
    wp = np.asarray(model.w_prime, dtype=float)
    keep = np.concatenate([[True], np.diff(w) > 0])
    w, wp = w[keep], wp[keep]
    lo, hi = w[0], w[-1]
    slack = range_tol * max(1.0, hi - lo)
    if u.min() < lo - slack or u.max() > hi + slack:
        raise RangeMismatch(f"range [{u.min()}, {u.max()}] of u not inside model range [{lo}, {hi}]")
    interp = PchipInterpolator(w, wp, extrapolate=False)
    bound = interp(np.clip(u, lo, hi))
    return float(np.max(np.abs(du) - bound))
