import json
import math
import warnings

import numpy as np
import pytest

from pspectral import oracles
from pspectral.eigensolver import (
    EigenResult,
    check_gradient_comparison,
    closed_form,
    delta_bar,
    lambda0,
    model_for_range,
    mu_p,
)
from pspectral.errors import (
    BracketFailure,
    NoCrossing,
    RangeMismatch,
    RangeUnreachableWarning,
    ValidationError,
)
from pspectral.ode_model import ModelParams, scale_solution, solve_ivp_cap
from pspectral.ptrig import pi_p
from pspectral.rayleigh import WeightedInterval, minimize_rayleigh


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
@pytest.mark.parametrize("D", [0.5, 1.0, math.pi, 5.0])
def test_closed_form_grid(p, D):
    ref = (p - 1) * (pi_p(p) / D) ** p
    res = mu_p(p, 0.0, D)
    assert abs(res.lam - ref) / ref < 1e-10
    assert res.residual == 0.0


def test_closed_form_examples():
    assert mu_p(2, 0, math.pi).lam == pytest.approx(1.0, rel=1e-15)
    assert mu_p(3, 0, pi_p(3)).lam == pytest.approx(2.0, rel=1e-15)


@pytest.mark.parametrize("p,D", [(2.0, math.pi), (3.0, 1.0), (1.5, 2.0)])
def test_kappa_zero_by_shooting(p, D):
    res = mu_p(p, 0.0, D, _force_shooting=True)
    assert abs(res.lam / closed_form(p, D) - 1) < 1e-9
    assert res.residual < res.tol


@pytest.mark.parametrize("kappa", [-1.0, 1.0])
@pytest.mark.parametrize("D", [1.0, 2.0])
def test_p2_finite_volume_oracle(kappa, D):
    lam = mu_p(2.0, kappa, D).lam
    assert abs(lam / oracles.neumann_fd_p2(kappa, D, 4000) - 1) < 1e-5


def test_polynomial_eigenfunctions():
    # exact eigenfunctions: t exp(-t^2/2) for kappa = -1, t^3 - 3t for kappa = 1
    assert mu_p(2, -1, 2).lam == pytest.approx(2.0, rel=1e-9)
    assert mu_p(2, 1, 2).lam == pytest.approx(3.0, rel=1e-9)


def test_delta_bar_kappa_zero():
    for p, lam in ((2.0, 4.0), (3.0, 1.5), (1.5, 7.0)):
        ref = pi_p(p) * ((p - 1) / lam) ** (1 / p)
        assert delta_bar(p, 0.0, lam) == pytest.approx(ref, rel=1e-10)


def test_delta_bar_matches_oracle():
    d = delta_bar(2.0, 1.0, 2.0)
    assert abs(oracles.neumann_fd_p2(1.0, d, 4000) - 2.0) / 2.0 < 1e-6


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_delta_bar_strictly_decreasing(p):
    l0 = lambda0(p, 1.0)
    d = [delta_bar(p, 1.0, f * l0) for f in (1.1, 1.3, 1.6, 2.0, 3.0)]
    assert np.all(np.diff(d) < 0)


def test_delta_bar_no_crossing_below_lambda0():
    with pytest.raises(NoCrossing):
        delta_bar(2.0, 1.0, 0.999)
    with pytest.raises(NoCrossing):
        delta_bar(3.0, 1.0, 0.5)


@pytest.mark.parametrize("p", [2.0, 3.0])
@pytest.mark.parametrize("kappa", [-1.0, 0.0, 1.0])
def test_monotone_in_D(p, kappa):
    lam = [mu_p(p, kappa, D).lam for D in (1.0, 2.0, 3.0, 4.0)]
    assert np.all(np.diff(lam) < 0)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.5])
def test_lambda0_hermite(kappa):
    assert abs(lambda0(2.0, kappa) / kappa - 1) < 1e-4


def test_lambda0_nonpositive_kappa():
    assert lambda0(2.0, 0.0) == 0.0
    assert lambda0(3.0, -2.0) == 0.0


def test_lambda0_p3_against_truncated_line():
    l0 = lambda0(3.0, 1.0)
    assert 0 < l0 < mu_p(3.0, 1.0, 4.0).lam
    s = np.linspace(-8.0, 8.0, 4097)
    dom = WeightedInterval(s, np.exp(-0.5 * s * s), 3.0)
    lam = minimize_rayleigh(dom).lambda_hat
    assert abs(lam - l0) / l0 < 2e-3


def test_lambda0_scaling_reported():
    # the substitution t -> t/sqrt(kappa) predicts lambda_0(p, kappa) = kappa^(p/2) lambda_0(p, 1)
    l1 = lambda0(3.0, 1.0)
    l4 = lambda0(3.0, 4.0)
    assert l4 / 4.0 ** 1.5 == pytest.approx(l1, rel=1e-6)


@pytest.mark.parametrize("p", [2.0, 3.0])
@pytest.mark.parametrize("D", [1.0, 2.0, 4.0])
def test_ordering_above_lambda0(p, D):
    assert mu_p(p, 1.0, D).lam > lambda0(p, 1.0)


@pytest.mark.parametrize("p,kappa,D", [(2.0, 1.0, 1.5), (3.0, 1.0, 2.0), (2.5, -1.0, 1.0), (1.5, 0.5, 3.0)])
def test_scaling_law(p, kappa, D):
    s = 2.0
    a = mu_p(p, kappa, D, 1e-12).lam
    b = s ** p * mu_p(p, kappa / s ** 2, D * s, 1e-12).lam
    assert abs(a - b) / a < 1e-7


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_shooting_sweep(p):
    lam = 1.5 * lambda0(p, 1.0)
    a_bar = 0.5 * delta_bar(p, 1.0, lam)
    pr = ModelParams(p, 1.0, lam)
    sym = solve_ivp_cap(pr, -a_bar, n_samples=3)
    assert abs(sym.m_of_a - 1) < 1e-8
    ms = []
    for off in (0.5, 1.0, 2.0, 4.0):
        sol = solve_ivp_cap(pr, -a_bar - off, n_samples=3)
        assert sol.delta_of_a > sym.delta_of_a
        ms.append(sol.m_of_a)
    assert 1 > ms[0] > ms[1] > ms[2] > ms[3] > 0


def test_eigen_result_fields():
    res = mu_p(2.0, 1.0, 2.0, 1e-10)
    assert isinstance(res, EigenResult)
    assert res.residual < res.tol
    assert res.params_echo == (2.0, 1.0, 2.0)
    assert res.a_bar == pytest.approx(1.0, abs=1e-9)
    data = json.loads(res.to_json())
    assert set(data) >= {"p", "kappa", "D", "lambda", "a_bar", "residual", "iterations"}
    assert data["lambda"] == res.lam


@pytest.mark.parametrize("tol", [1e-6, 1e-9, 1e-12])
def test_residual_below_tol(tol):
    for p, kappa, D in ((2.0, 1.0, 1.0), (3.0, -1.0, 2.0), (1.5, 2.0, 0.7)):
        res = mu_p(p, kappa, D, tol)
        assert res.residual < tol


def test_mu_validation():
    with pytest.raises(ValidationError):
        mu_p(2.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        mu_p(2.0, 1.0, -1.0)
    with pytest.raises(ValidationError):
        mu_p(0.9, 1.0, 1.0)
    with pytest.raises(ValidationError):
        mu_p(2.0, 1.0, 1.0, tol=0.0)


def test_bracket_failure():
    with pytest.raises(BracketFailure):
        mu_p(2.0, 1.0, 1e-7)


def test_model_for_range_symmetric():
    lam = 1.5
    a_bar = 0.5 * delta_bar(2.0, 1.0, lam)
    sol = model_for_range(2.0, 1.0, lam, 1.0)
    assert sol.a == pytest.approx(-a_bar, abs=1e-12)
    assert sol.m_of_a == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("p,kappa", [(2.0, 1.0), (3.0, 1.0), (2.0, -1.0)])
def test_model_for_range_hits_target(p, kappa):
    lam = 1.5 * lambda0(p, kappa) if kappa > 0 else 3.0
    a_bar = 0.5 * delta_bar(p, kappa, lam)
    sol = model_for_range(p, kappa, lam, 0.5)
    assert abs(sol.m_of_a - 0.5) < 1e-8
    assert sol.w[0] == -1.0
    assert np.all(np.diff(sol.w) > 0)
    if kappa > 0:
        assert sol.a < -a_bar
        assert sol.delta_of_a > 2 * a_bar
    else:
        assert sol.a > -a_bar


def test_model_for_range_kappa_zero_warns():
    with pytest.warns(RangeUnreachableWarning):
        sol = model_for_range(2.0, 0.0, 1.0, 0.5)
    assert sol.m_of_a == pytest.approx(1.0, abs=1e-9)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        model_for_range(2.0, 0.0, 1.0, 1.0)


def test_model_for_range_validation():
    with pytest.raises(ValidationError):
        model_for_range(2.0, 1.0, 1.5, 0.0)
    with pytest.raises(ValidationError):
        model_for_range(2.0, 1.0, 1.5, 1.5)


def _sampled(sol):
    return sol.t_grid, sol.w, sol.w_prime


def test_gradient_comparison_equality_case():
    model = model_for_range(3.0, 1.0, 3.0, 0.7)
    assert abs(check_gradient_comparison(*_sampled(model), model)) < 1e-8
    t = np.linspace(model.a, model.b_of_a, 777)
    w, wp = model.evaluate(t)
    # off the grid the bound carries the interpolation error of the root-type ends of w'(w)
    assert abs(check_gradient_comparison(t, w, wp, model)) < 1e-6


@pytest.mark.parametrize("c", [0.9, 0.5, 0.2])
def test_gradient_comparison_scaled(c):
    model = model_for_range(2.0, 1.0, 2.0, 1.0)
    u = scale_solution(model, c)
    assert check_gradient_comparison(*_sampled(u), model) <= 0.0


def test_gradient_comparison_range_mismatch():
    model = model_for_range(2.0, 1.0, 2.0, 0.6)
    t, w, wp = _sampled(model)
    with pytest.raises(RangeMismatch):
        check_gradient_comparison(t, 1.2 * w, wp, model)
