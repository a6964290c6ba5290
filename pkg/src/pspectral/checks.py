"""Fast invariant suites behind ``pspectral check``.

Each check returns ``(name, passed, detail)``; suites are lists of checks.
"""

import math

import numpy as np

from . import oracles
from .eigensolver import closed_form, delta_bar, lambda0, model_for_range, mu_p
from .geometry import SurfaceSpec, build_surface, cylinder_interval, verify_curvature
from .ode_model import ModelParams, integrate_prufer, solve_ivp_odd
from .ptrig import cos_p, pi_p, pi_p_quadrature, sin_p
from .rayleigh import minimize_rayleigh


def _result(name, value, limit, detail=""):
    ok = bool(np.isfinite(value) and value < limit)
    return name, ok, f"{value:.3e} < {limit:.0e}" + (f" ({detail})" if detail else "")


def check_ptrig():
    out = []
    worst = 0.0
    for p in (1.2, 1.5, 2.0, 3.0, 7.0):
        pp = pi_p(p)
        t = np.linspace(-pp / 2, 1.5 * pp, 401)
        s, c = sin_p(t, p), cos_p(t, p)
        worst = max(worst, np.max(np.abs(np.abs(s) ** p + np.abs(c) ** p - 1)))
    out.append(_result("ptrig identity |sin|^p + |cos|^p = 1", worst, 1e-9))
    rel = max(abs(pi_p_quadrature(p) - pi_p(p)) / pi_p(p) for p in (1.2, 1.5, 2.0, 3.0, 7.0))
    out.append(_result("pi_p closed form vs quadrature", rel, 1e-10))
    err = max(abs(sin_p(t, p) - oracles.sin_p_quadrature(t, p)) for p, t in ((1.5, 0.4), (3.0, 0.9), (7.0, 1.0)))
    out.append(_result("sin_p vs quadrature inversion", err, 1e-12))
    return out


def check_ode():
    out = []
    pr = ModelParams(2.0, 1.0, 2.0)
    tr = integrate_prufer(pr, 0.0, 0.0, 0.0, 1.0, 1e-13)
    ref = oracles.rk4_theta_p2(1.0, 2.0, 1.0, 10 ** 6)
    out.append(_result("Prufer phase vs fixed-step RK4", abs(tr.theta[-1] - ref), 1e-9))
    sol = solve_ivp_odd(ModelParams(2.0, 1.0, 1.0), 3.0)
    out.append(_result("odd Hermite solution w(t) = t", float(np.max(np.abs(sol.w - sol.t_grid))), 1e-8))
    tr2 = integrate_prufer(pr, 0.0, 0.0, 0.0, 1.0, 1e-13)
    same = np.array_equal(tr.theta, tr2.theta) and np.array_equal(tr.log_r, tr2.log_r)
    out.append(("deterministic trajectories", same, "bit-identical" if same else "differ"))
    return out


def check_eigen():
    out = []
    worst = 0.0
    for p in (1.5, 2.0, 3.0, 4.0):
        for D in (0.5, 1.0, math.pi, 5.0):
            ref = closed_form(p, D)
            worst = max(worst, abs(mu_p(p, 0.0, D).lam - ref) / ref)
    out.append(_result("kappa = 0 closed form", worst, 1e-8))
    err = max(abs(mu_p(2.0, k, D).lam / oracles.neumann_fd_p2(k, D, 4000) - 1) for k in (-1.0, 1.0) for D in (1.0, 2.0))
    out.append(_result("p = 2 shooting vs finite volumes", err, 1e-5))
    out.append(_result("lambda0(2, 1) = 1", abs(lambda0(2.0, 1.0) - 1.0), 1e-4))
    lam = [1.5, 2.0, 3.0, 4.0]
    d = [delta_bar(2.0, 1.0, x) for x in lam]
    out.append(("delta_bar strictly decreasing", bool(np.all(np.diff(d) < 0)), str(np.round(d, 6).tolist())))
    m = model_for_range(2.0, 1.0, 1.5, 0.5)
    out.append(_result("model_for_range hits u_max", abs(m.m_of_a - 0.5), 1e-8))
    return out


def check_rayleigh():
    out = []
    for p, k in ((2.0, 1.0), (3.0, -1.0)):
        lam = minimize_rayleigh(cylinder_interval(p, k, 2.0, 3, 1.0, 1024)).lambda_hat
        mu = mu_p(p, k, 2.0).lam
        out.append(_result(f"minimizer vs mu_p (p={p:g}, kappa={k:g})", abs(lam - mu) / mu, 2e-3))
    return out


def check_geometry():
    out = []
    for k in (0.0, 1.0):
        s = build_surface(SurfaceSpec(3, k, 1.0, 0.05, 0.005), 4096)
        slack = verify_curvature(s, 3, k)
        out.append(("curvature admissible n=3, kappa=%g" % k, slack >= 0, f"min slack {slack:.3e}"))
    s = build_surface(SurfaceSpec(2, 1.0, 1.0, 0.05, 0.005), 4096)
    slack = verify_curvature(s, 2, 1.0)
    out.append(("curvature fails for n=2, kappa=1", slack < 0, f"min slack {slack:.3e}"))
    return out


SUITES = {
    "ptrig": check_ptrig,
    "ode": check_ode,
    "eigen": check_eigen,
    "rayleigh": check_rayleigh,
    "geometry": check_geometry,
}


def run_suite(name):
    names = list(SUITES) if name == "all" else [name]
    results = []
    for n in names:
        for check in SUITES[n]():
            results.append((n,) + tuple(check))
    return results
