"""Independent reference computations used to cross-check the solvers.

Each routine takes a different numerical route from the production code:
a finite-volume matrix eigenproblem instead of shooting, a fixed-step RK4
instead of the adaptive pair, quadrature plus root-finding instead of the
series inversion of sin_p.
"""

import math

import numpy as np
from numba import njit
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .ptrig import pi_p_quadrature
from .quadrature import tanh_sinh


def neumann_fd_p2(kappa, D, N=4000):
    """First nonzero Neumann eigenvalue of ``-u'' + kappa t u' = lam u`` on ``[-D/2, D/2]``.

    Conservative form ``-(rho u')' = lam rho u`` with ``rho = exp(-kappa t^2/2)``
    on N cells: midpoint weights in the stiffness, lumped (trapezoid) mass.
    The symmetric pencil is reduced to ``M^-1/2 K M^-1/2``, which is tridiagonal.
    """
    t = np.linspace(-0.5 * D, 0.5 * D, N + 1)
    h = t[1] - t[0]
    mid = 0.5 * (t[:-1] + t[1:])
    # shift the exponent so the largest weight is one
    expo = -0.5 * kappa * t ** 2
    shift = max(expo.max(), (-0.5 * kappa * mid ** 2).max())
    rho_c = np.exp(-0.5 * kappa * mid ** 2 - shift) / h
    m = np.exp(expo - shift) * h
    m[0] *= 0.5
    m[-1] *= 0.5
    diag = np.zeros(N + 1)
    diag[:-1] += rho_c
    diag[1:] += rho_c
    off = -rho_c
    s = 1.0 / np.sqrt(m)
    d = diag * s * s
    e = off * s[:-1] * s[1:]
    vals = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 1))
    return float(vals[1])


def rk4_theta_p2(kappa, lam, t1, n):
    """Fixed-step RK4 (n steps) on the p = 2 phase equation ``theta' = a - kappa t cos sin``."""
    return _rk4(float(kappa), math.sqrt(lam), float(t1), int(n))


@njit(cache=True)
def _rk4(kappa, a, t1, n):
    h = t1 / n
    th = 0.0
    for i in range(n):
        t = i * h
        k1 = a - kappa * t * math.cos(th) * math.sin(th)
        x = th + 0.5 * h * k1
        k2 = a - kappa * (t + 0.5 * h) * math.cos(x) * math.sin(x)
        x = th + 0.5 * h * k2
        k3 = a - kappa * (t + 0.5 * h) * math.cos(x) * math.sin(x)
        x = th + h * k3
        k4 = a - kappa * (t + h) * math.cos(x) * math.sin(x)
        th += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return th


def sin_p_quadrature(t, p):
    """sin_p on ``[0, pi_p/2]`` by brentq on tanh-sinh quadrature of the defining integral."""
    half = 0.5 * pi_p_quadrature(p)
    if t >= half:
        return 1.0

    def F(x):
        # x * int_0^1 (1 - (x v)^p)^(-1/p) dv, regular for x < 1
        val, _ = tanh_sinh(lambda v, dl, dr: (1.0 - (x * v) ** p) ** (-1.0 / p), 0.0, 1.0, tol=1e-15)
        return x * val

    return brentq(lambda x: F(x) - t, 0.0, 1.0, xtol=1e-15, rtol=1e-15)


def arctan_p_quadrature(x, p):
    """``int_0^x ds / (1 + |s|^p)`` by tanh-sinh quadrature."""
    if x == 0:
        return 0.0
    val, _ = tanh_sinh(lambda s, dl, dr: 1.0 / (1.0 + np.abs(s) ** p), 0.0, abs(x), tol=1e-15)
    return math.copysign(val, x)


def model_residual(t, w, wp, p, kappa, lam):
    """Pointwise residual of the model ODE at interior samples.

    Uses ``v = |w'|^(p-2) w'`` so that ``(p-1)|w'|^(p-2) w'' = v'``, with a
    five-point derivative on a uniform grid. Returns ``(t_inner, residual, wp_inner)``.
    """
    t = np.asarray(t, dtype=float)
    v = np.sign(wp) * np.abs(wp) ** (p - 1.0)
    h = t[1] - t[0]
    dv = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    ti = t[2:-2]
    wi = w[2:-2]
    vi = v[2:-2]
    res = dv - kappa * ti * vi + lam * np.sign(wi) * np.abs(wi) ** (p - 1.0)
    return ti, res, wp[2:-2]
