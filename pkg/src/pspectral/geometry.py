"""Capped thin cylinders of revolution with a tuned potential.

The profile curve has curvature ``1/r`` on a quarter circle at each pole,
zero along the middle, and a smooth switch of half-width ``delta`` between
them. The potential has ``f'' = kappa (1 - D/(pi r))`` on the caps and
``f'' = kappa`` on the middle so that ``f'(D/2) = 0``. Everything is built
on ``[0, D/2]`` and mirrored about ``D/2``.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import mu_p
from .errors import CurvatureViolated, SpecInfeasible, ValidationError
from .ptrig import check_p
from .rayleigh import WeightedInterval, minimize_rayleigh

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_PANELS = 64


def bump(s):
    """Smooth nonincreasing step: 1 for s <= -1, 0 for s >= 1, bump(s) + bump(-s) = 1."""
    s = np.asarray(s, dtype=float)
    a = 1.0 - s
    b = 1.0 + s
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        ga = np.where(a > 0, np.exp(-1.0 / np.where(a > 0, a, 1.0)), 0.0)
        gb = np.where(b > 0, np.exp(-1.0 / np.where(b > 0, b, 1.0)), 0.0)
        out = ga / (ga + gb)
    out = np.where(s <= -1.0, 1.0, np.where(s >= 1.0, 0.0, out))
    return float(out) if out.ndim == 0 else out


def _gl(fun, lo, hi):
    """Vectorized 16-point Gauss-Legendre of ``fun`` over ``[lo_i, hi_i]``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[..., None] + half[..., None] * _GL_X
    return half * (fun(x) @ _GL_W)


def _panel_integral(fun, x, edges, cum):
    """``int_{edges[0]}^x fun`` from cumulative panel sums ``cum`` plus a partial panel."""
    x = np.asarray(x, dtype=float)
    j = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(edges) - 2)
    return cum[j] + _gl(fun, edges[j], x)


class _BumpIntegrals:
    """``B1(x) = int_{-1}^x bump`` and ``B2(x) = int_{-1}^x B1`` on ``[-1, 1]``."""

    def __init__(self):
        self.edges = np.linspace(-1.0, 1.0, _PANELS + 1)
        self.cum1 = np.concatenate([[0.0], np.cumsum(_gl(bump, self.edges[:-1], self.edges[1:]))])
        self.cum2 = np.concatenate([[0.0], np.cumsum(_gl(self.B1, self.edges[:-1], self.edges[1:]))])

    def B1(self, x):
        return _panel_integral(bump, x, self.edges, self.cum1)

    def B2(self, x):
        return _panel_integral(self.B1, x, self.edges, self.cum2)


_BUMP = None


def _bump_integrals():
    global _BUMP
    if _BUMP is None:
        _BUMP = _BumpIntegrals()
    return _BUMP


@dataclass(frozen=True)
class SurfaceSpec:
    n: int
    kappa: float
    D: float
    cap_radius: float
    smoothing_half_width: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise SpecInfeasible(f"dimension n must be an integer >= 2, got {self.n!r}")
        r, d, D = self.cap_radius, self.smoothing_half_width, self.D
        if not (r > 0 and d > 0 and D > 0) or not all(map(math.isfinite, (r, d, D, self.kappa))):
            raise SpecInfeasible("cap radius, smoothing half-width and D must be positive and finite")
        if not math.pi * r / 2 + d < D / 2:
            raise SpecInfeasible(f"cap does not fit: pi r/2 + delta = {math.pi * r / 2 + d} >= D/2 = {D / 2}")
        if not d < r / 4:
            raise SpecInfeasible(f"smoothing half-width {d} must be below cap_radius/4 = {r / 4}")

    @property
    def r(self):
        return self.cap_radius

    @property
    def delta(self):
        return self.smoothing_half_width


@dataclass
class RevolutionSurface:
    spec: SurfaceSpec
    s_grid: np.ndarray
    k: np.ndarray
    theta: np.ndarray
    y: np.ndarray
    y_prime: np.ndarray
    f: np.ndarray
    f_prime: np.ndarray
    f_double_prime: np.ndarray
    ric_f_radial: np.ndarray = field(default=None)
    ric_f_tangential: np.ndarray = field(default=None)

    COLUMNS = ("s", "k", "y", "y_prime", "f", "f_prime", "f_pp", "ric_radial", "ric_tangential")

    def to_rows(self):
        return np.column_stack([self.s_grid, self.k, self.y, self.y_prime, self.f, self.f_prime,
                                self.f_double_prime, self.ric_f_radial, self.ric_f_tangential])

    def to_csv(self, path_or_file):
        write_csv(path_or_file, self.COLUMNS, self.to_rows())


def write_csv(path_or_file, header, rows):
    def _write(fh):
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([repr(float(v)) for v in row])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


def _half_profile(spec, s):
    """Profile quantities on ``s in [0, D/2]``."""
    r, d, D, kap = spec.r, spec.delta, spec.D, spec.kappa
    B = _bump_integrals()
    s1 = 0.5 * math.pi * r - d
    s2 = 0.5 * math.pi * r + d
    c = D / (math.pi * r)
    cap = s <= s1
    mid = (s > s1) & (s < s2)
    flat = s >= s2

    k = np.zeros_like(s)
    th = np.empty_like(s)
    y = np.empty_like(s)
    yp = np.empty_like(s)
    fpp = np.empty_like(s)
    fp = np.empty_like(s)
    f = np.empty_like(s)

    # caps: quarter circle
    sc = s[cap]
    k[cap] = 1.0 / r
    th[cap] = sc / r
    y[cap] = r * np.sin(sc / r)
    yp[cap] = np.cos(sc / r)
    fpp[cap] = kap * (1.0 - c)
    fp[cap] = kap * (1.0 - c) * sc
    f[cap] = 0.5 * kap * (1.0 - c) * sc * sc

    th1 = s1 / r
    y1 = r * math.sin(th1)
    fp1 = kap * (1.0 - c) * s1
    f1 = 0.5 * kap * (1.0 - c) * s1 * s1

    def theta_at(x):
        return th1 + (d / r) * B.B1((x - 0.5 * math.pi * r) / d)

    # switching region: y by panel quadrature of cos(theta)
    sm = s[mid]
    sig = (sm - 0.5 * math.pi * r) / d
    k[mid] = bump(sig) / r
    th[mid] = theta_at(sm)
    edges = np.linspace(s1, s2, _PANELS + 1)
    cos_th = lambda x: np.cos(theta_at(x))
    cum = np.concatenate([[0.0], np.cumsum(_gl(cos_th, edges[:-1], edges[1:]))])
    y[mid] = y1 + _panel_integral(cos_th, sm, edges, cum)
    yp[mid] = np.cos(th[mid])
    # f'' = kappa - kappa c bump: integrate the bump part in closed form through B1, B2
    fpp[mid] = kap - kap * c * bump(sig)
    u = sm - s1
    fp[mid] = fp1 + kap * u - kap * c * d * B.B1(sig)
    f[mid] = f1 + fp1 * u + 0.5 * kap * u * u - kap * c * d * d * B.B2(sig)

    # flat middle
    y2 = y1 + cum[-1]
    fp2 = fp1 + 2.0 * kap * d - kap * c * d * float(B.B1(1.0))
    f2 = f1 + fp1 * 2 * d + 2.0 * kap * d * d - kap * c * d * d * float(B.B2(1.0))
    sf = s[flat]
    v = sf - s2
    th[flat] = 0.5 * math.pi
    y[flat] = y2
    yp[flat] = 0.0
    fpp[flat] = kap
    fp[flat] = fp2 + kap * v
    f[flat] = f2 + fp2 * v + 0.5 * kap * v * v
    return k, th, y, yp, f, fp, fpp


def build_surface(spec, mesh_N=4096):
    """Profile and potential on a uniform grid of ``mesh_N`` cells (even) over ``[0, D]``."""
    mesh_N = int(mesh_N)
    if mesh_N < 16 or mesh_N % 2:
        raise ValidationError("mesh_N must be an even integer >= 16")
    s = np.linspace(0.0, spec.D, mesh_N + 1)
    half = mesh_N // 2
    s[half] = 0.5 * spec.D
    sh = s[: half + 1]
    k, th, y, yp, f, fp, fpp = _half_profile(spec, sh)
    rev = slice(half - 1, None, -1)

    def even(a):
        return np.concatenate([a, a[rev]])

    def odd(a):
        return np.concatenate([a, -a[rev]])

    surf = RevolutionSurface(
        spec=spec,
        s_grid=s,
        k=even(k),
        theta=np.concatenate([th, math.pi - th[rev]]),
        y=even(y),
        y_prime=odd(yp),
        f=even(f),
        f_prime=odd(fp),
        f_double_prime=even(fpp),
    )
    surf.ric_f_radial, surf.ric_f_tangential = ricci_f(surf, spec.n)
    return surf


def ricci_f(surface, n):
    """Eigenvalues of ``Ric + Hess f`` along the profile (radial) and the spheres (tangential).

    With principal curvatures ``k`` and ``m = sqrt(1 - y'^2)/y`` (the latter
    ``n - 1`` times), Gauss gives ``Ric(d_s, d_s) = (n-1) k m`` and
    ``Ric(e, e) = k m + (n-2) m^2``. The Hessian of ``f`` adds ``f''`` and
    ``(y'/y) f'``. On the caps ``m = 1/r``; at the poles ``(y'/y) f' -> f''``.
    """
    spec = surface.spec
    r = spec.r
    s = surface.s_grid
    D = spec.D
    dist = np.minimum(s, D - s)
    on_cap = dist <= 0.5 * math.pi * r - spec.delta
    y = surface.y
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.where(on_cap, 1.0 / r, np.sin(surface.theta) / y)
        hess_t = surface.y_prime * surface.f_prime / y
    pole = y == 0.0
    hess_t = np.where(pole, surface.f_double_prime, hess_t)
    radial = (n - 1) * surface.k * m + surface.f_double_prime
    tangential = surface.k * m + (n - 2) * m * m + hess_t
    return radial, tangential


def verify_curvature(surface, n, kappa):
    """``min over the grid of min(radial, tangential) - kappa``; nonnegative means admissible."""
    radial, tangential = ricci_f(surface, n)
    return float(np.min(np.minimum(radial, tangential)) - kappa)


def reduce_to_interval(surface, n, p):
    """Weighted interval ``[0, D]`` with density ``y^(n-1) e^(-f)`` for rotationally symmetric functions."""
    rho = surface.y ** (n - 1) * np.exp(-surface.f)
    return WeightedInterval(surface.s_grid.copy(), rho, p)


def cylinder_interval(p, kappa, D, n, r, mesh_N=1024):
    """Cylinder ``r S^(n-1) x [-D/2, D/2]`` with potential ``kappa s^2/2``, reduced to ``[-D/2, D/2]``."""
    if not r > 0:
        raise ValidationError("r must be positive")
    s = np.linspace(-0.5 * D, 0.5 * D, int(mesh_N) + 1)
    return WeightedInterval(s, r ** (n - 1) * np.exp(-0.5 * kappa * s * s), p)


def default_mesh(D, delta, minimum=4096):
    # at least 20 cells across each switching region of width 2 delta
    n = max(minimum, math.ceil(20.0 * D / (2.0 * delta)))
    return n + (n % 2)


def plateau_test_function(surface, p, tol=1e-10):
    """Plateau-extended model eigenfunction ``w(clip(s - D/2, -L, L))``, ``L = D/2 - pi r/2 - delta``.

    ``w`` is the odd model solution whose first stationary point is at ``L``;
    returns ``(psi, mu_p(kappa, 2L))``.
    """
    from .ode_model import ModelParams, solve_ivp_odd

    spec = surface.spec
    L = 0.5 * spec.D - 0.5 * math.pi * spec.r - spec.delta
    res = mu_p(p, spec.kappa, 2.0 * L, tol)
    sol = solve_ivp_odd(ModelParams(p, spec.kappa, res.lam), res.a_bar, n_samples=3)
    t = np.clip(surface.s_grid - 0.5 * spec.D, -res.a_bar, res.a_bar)
    w, _ = sol.evaluate(t)
    return w, res.lam


def sharpness_experiment(p, kappa, n, D, r_list, delta_rule=None, mesh_N=None, tol=1e-12,
                         raise_on_violation=False):
    """One row per cap radius: discrete eigenvalue of the capped surface against ``mu_p(kappa, D)``.

    Rows whose surface fails the curvature condition carry status
    ``curvature_violated`` and no eigenvalue (or raise, if requested).
    """
    p = check_p(p)
    if delta_rule is None:
        delta_rule = lambda r: r / 10.0
    mu_ref = mu_p(p, kappa, D).lam
    rows = []
    for r in r_list:
        delta = delta_rule(r)
        spec = SurfaceSpec(n, kappa, D, r, delta)
        N = mesh_N if mesh_N is not None else default_mesh(D, delta)
        surf = build_surface(spec, N)
        slack = verify_curvature(surf, n, kappa)
        row = {"r": r, "delta": delta, "lambda_hat": math.nan, "mu_ref": mu_ref, "gap": math.nan,
               "rel_gap": math.nan, "min_slack": slack, "mesh": N, "status": "ok"}
        if slack < 0:
            if raise_on_violation:
                raise CurvatureViolated(f"min slack {slack:.3g} < 0 for r={r}, delta={delta}, n={n}, kappa={kappa}")
            row["status"] = "curvature_violated"
            rows.append(row)
            continue
        dom = reduce_to_interval(surf, n, p)
        lam = minimize_rayleigh(dom, tol=tol).lambda_hat
        row.update(lambda_hat=lam, gap=lam - mu_ref, rel_gap=abs(lam - mu_ref) / mu_ref)
        rows.append(row)
    return rows


def surface_gradient_comparison(p, kappa, n=3, D=1.0, r=0.05, delta=0.005, mesh_N=4096, tol=1e-12):
    """Gradient comparison for the reduced capped-surface eigenfunction.

    The discrete eigenfunction is oriented and scaled so that ``min u = -1``
    and ``max u <= 1``; the model comes from :func:`model_for_range` at the
    discrete eigenvalue with ``m(a) = max u``. Slopes are compared on cell
    midpoints. Returns ``(max_violation, lambda_hat, u_max)``.
    """
    from .eigensolver import check_gradient_comparison, model_for_range

    surf = build_surface(SurfaceSpec(n, kappa, D, r, delta), mesh_N)
    eig = minimize_rayleigh(reduce_to_interval(surf, n, p), tol=tol)
    u = eig.phi
    if u.max() > -u.min():
        u = -u
    u = u / -u.min()
    u_max = float(u.max())
    # the kappa = 0 model is translation invariant and always reaches 1
    model = model_for_range(p, kappa, eig.lambda_hat, 1.0 if kappa == 0 else min(u_max, 1.0))
    s = surf.s_grid
    sm = 0.5 * (s[1:] + s[:-1])
    um = 0.5 * (u[1:] + u[:-1])
    du = np.diff(u) / np.diff(s)
    viol = check_gradient_comparison(sm, um, du, model)
    return viol, eig.lambda_hat, u_max
