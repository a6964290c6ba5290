"""Generalized trigonometric functions sin_p, cos_p, tan_p, arctan_p and pi_p.

On ``[0, pi_p/2]``, ``sin_p`` inverts the incomplete integral

    F(x) = int_0^x (1 - s^p)^(-1/p) ds,

and is continued to the line by ``sin_p(-t) = -sin_p(t)``,
``sin_p(pi_p - t) = sin_p(t)`` and period ``2 pi_p``. ``cos_p`` is its
derivative, so ``|sin_p|^p + |cos_p|^p = 1``.

``F`` is summed from one of two binomial series, both with ratio at most 1/2:

* in ``X = x^p`` while ``X <= 1/2``::

      F(x) = x * sum_k (1/p)_k / k! * X^k / (k p + 1)

* in the complement ``V = 1 - x^p`` otherwise::

      pi_p/2 - F(x) = (1/p) V^(1-1/p) * sum_k (1-1/p)_k / k! * V^k / (k + 1 - 1/p)

Inverting the second series yields ``V = |cos_p|^p`` directly, so ``cos_p``
keeps full relative accuracy next to its zeros instead of being recovered
from ``1 - |sin_p|^p``. Each inversion is a Newton iteration started on the
convex side of the root, hence monotone.
"""

import math

import numpy as np
from numba import njit

from .errors import CrossCheckFailure, PoleError, ValidationError

P_MIN = 1.0 + 1e-9
P_MAX = 1e6


def check_p(p):
    """Validate an exponent ``1 < p < inf`` and return it as a float."""
    p = float(p)
    if not (P_MIN < p < P_MAX) or math.isnan(p):
        raise ValidationError(f"p must satisfy {P_MIN} < p < {P_MAX}, got {p!r}")
    return p


def pi_p(p, debug=False):
    """Half period of sin_p, ``2 pi / (p sin(pi/p))``.

    With ``debug=True`` the closed form is compared against tanh-sinh
    quadrature of ``2 int_0^1 (1 - s^p)^(-1/p) ds`` and a relative mismatch
    above 1e-10 raises :class:`CrossCheckFailure`.
    """
    p = check_p(p)
    value = 2.0 * math.pi / (p * math.sin(math.pi / p))
    if debug:
        quad = pi_p_quadrature(p)
        if abs(quad - value) > 1e-10 * value:
            raise CrossCheckFailure(f"pi_p({p}): closed form {value!r} vs quadrature {quad!r}")
    return value


def pi_p_quadrature(p):
    from .quadrature import tanh_sinh

    p = check_p(p)

    def integrand(x, dl, dr):
        # 1 - (1 - dr)^p without cancellation near s = 1
        return (-np.expm1(p * np.log1p(-dr))) ** (-1.0 / p)

    value, _ = tanh_sinh(integrand, 0.0, 1.0, tol=1e-15)
    return 2.0 * value


# --------------------------------------------------------------------------
# series kernels


@njit(cache=True)
def _low_series(X, p):
    q = 1.0 / p
    coef = 1.0
    xk = 1.0
    total = 1.0
    k = 0
    while k < 400:
        coef *= (q + k) / (k + 1.0)
        k += 1
        xk *= X
        term = coef * xk / (k * p + 1.0)
        total += term
        if term <= 1e-17 * total:
            break
    return total


@njit(cache=True)
def _high_series(V, p):
    b = 1.0 - 1.0 / p
    coef = 1.0
    vk = 1.0
    total = 1.0 / b
    k = 0
    while k < 400:
        coef *= (b + k) / (k + 1.0)
        k += 1
        vk *= V
        term = coef * vk / (k + b)
        total += term
        if term <= 1e-17 * total:
            break
    return total


@njit(cache=True)
def _split_point(p):
    """Angle at which |sin_p|^p = 1/2 (switch between the two series)."""
    x = 0.5 ** (1.0 / p)
    return x * _low_series(0.5, p)


@njit(cache=True)
def _principal(u, p, half_pi_p, u_split):
    """sin_p, cos_p and powers on ``u in [0, pi_p/2]``.

    Returns ``(s, c, s_abs_p, c_abs_p, c_abs_pm1)``.
    """
    if u <= u_split:
        # F(x) = u; F convex so Newton from x >= root decreases monotonically
        x = u
        xmax = 0.5 ** (1.0 / p)
        if x > xmax:
            x = xmax
        for _ in range(60):
            X = x ** p
            F = x * _low_series(X, p)
            dF = (1.0 - X) ** (-1.0 / p)
            dx = (F - u) / dF
            x -= dx
            if x < 0.0:
                x = 0.0
            if abs(dx) <= 4e-16 * x:
                break
        X = x ** p
        cp = 1.0 - X
        return x, cp ** (1.0 / p), X, cp, cp ** (1.0 - 1.0 / p)
    g = half_pi_p - u
    if g < 0.0:
        g = 0.0
    b = 1.0 - 1.0 / p
    # unknown z = V^(1-1/p) = |cos_p|^(p-1); G(z) is convex with G'(0) = 1/(p-1)
    z = (p - 1.0) * g
    zmax = 0.5 ** b
    if z > zmax:
        z = zmax
    for _ in range(60):
        V = z ** (1.0 / b)
        G = z * _high_series(V, p) / p
        dG = (1.0 - V) ** (1.0 / p - 1.0) / (p - 1.0)
        dz = (G - g) / dG
        z -= dz
        if z < 0.0:
            z = 0.0
        if abs(dz) <= 4e-16 * z:
            break
    V = z ** (1.0 / b)
    sp = 1.0 - V
    return sp ** (1.0 / p), V ** (1.0 / p), sp, V, z


@njit(cache=True)
def _trig(t, p, pp, u_split):
    """Signed ``(sin_p, cos_p, |sin_p|^p, |cos_p|^p, cos_p^(p-1))`` at any real t.

    ``cos_p^(p-1)`` is the sign-preserving power ``|cos_p|^(p-2) cos_p``.
    """
    two = 2.0 * pp
    half = 0.5 * pp
    # work on |t| so that sin_p is odd and cos_p even bit for bit
    ssign = -1.0 if t < 0.0 else 1.0
    tau = abs(t)
    if tau >= two:
        tau = tau - two * math.floor(tau / two)
    if tau > pp:
        tau = two - tau
        ssign = -ssign
    csign = 1.0
    if tau > half:
        tau = pp - tau
        csign = -1.0
    s, c, sp, cp, cpm1 = _principal(tau, p, half, u_split)
    return ssign * s, csign * c, sp, cp, csign * cpm1


@njit(cache=True)
def _sincos_array(t, p, pp, u_split, out_s, out_c):
    for i in range(t.size):
        s, c, sp, cp, cpm1 = _trig(t[i], p, pp, u_split)
        out_s[i] = s
        out_c[i] = c


@njit(cache=True)
def _arctan_array(x, p, pp, u_split, out):
    half = 0.5 * pp
    b = 1.0 - 1.0 / p
    for i in range(x.size):
        xi = x[i]
        ax = abs(xi)
        if math.isinf(ax):
            val = half
        else:
            xp = ax ** p
            V = 1.0 / (1.0 + xp)
            if V >= 0.5:
                X = xp * V
                y = ax * V ** (1.0 / p)
                val = y * _low_series(X, p)
            else:
                val = half - V ** b * _high_series(V, p) / p
        out[i] = val if xi >= 0 else -val


# --------------------------------------------------------------------------
# public API


class _Consts:
    __slots__ = ("p", "pi_p", "u_split")

    def __init__(self, p):
        self.p = check_p(p)
        self.pi_p = pi_p(self.p)
        self.u_split = _split_point(self.p)


_CACHE = {}


def constants(p):
    """Per-exponent constants ``(p, pi_p, u_split)`` used by the kernels."""
    key = float(p)
    c = _CACHE.get(key)
    if c is None:
        c = _Consts(key)
        if len(_CACHE) > 256:
            _CACHE.clear()
        _CACHE[key] = c
    return c


def _apply(kernel, t, p):
    c = constants(p)
    arr = np.asarray(t, dtype=float)
    flat = np.ascontiguousarray(arr.ravel())
    out_s = np.empty_like(flat)
    out_c = np.empty_like(flat)
    kernel(flat, c.p, c.pi_p, c.u_split, out_s, out_c)
    return arr, out_s, out_c


def _shape(arr, flat):
    if arr.ndim == 0:
        return float(flat[0])
    return flat.reshape(arr.shape)


def reduce_angle(t, p):
    """Representative of ``t`` modulo ``2 pi_p`` in ``[-pi_p/2, 3 pi_p/2)``."""
    pp = constants(p).pi_p
    t = np.asarray(t, dtype=float)
    r = t - 2 * pp * np.floor((t + 0.5 * pp) / (2 * pp))
    return float(r) if r.ndim == 0 else r


def sin_p(t, p):
    arr, s, _ = _apply(_sincos_array, t, p)
    return _shape(arr, s)


def cos_p(t, p):
    arr, _, c = _apply(_sincos_array, t, p)
    return _shape(arr, c)


def sincos_p(t, p):
    arr, s, c = _apply(_sincos_array, t, p)
    return _shape(arr, s), _shape(arr, c)


def tan_p(t, p):
    arr, s, c = _apply(_sincos_array, t, p)
    if np.any(c == 0.0):
        raise PoleError("tan_p evaluated at a zero of cos_p")
    return _shape(arr, s / c)


def arctan_p(x, p):
    """Inverse of tan_p on ``(-pi_p/2, pi_p/2)``; ``d/dx arctan_p = 1/(1 + |x|^p)``."""
    c = constants(p)
    arr = np.asarray(x, dtype=float)
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    _arctan_array(flat, c.p, c.pi_p, c.u_split, out)
    return _shape(arr, out)
