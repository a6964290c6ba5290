import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pspectral import oracles
from pspectral.errors import CrossCheckFailure, PoleError, ValidationError
from pspectral.ptrig import arctan_p, cos_p, pi_p, pi_p_quadrature, reduce_angle, sin_p, sincos_p, tan_p

P_GRID = (1.2, 1.5, 2.0, 3.0, 7.0)


def grid(p, n=401):
    pp = pi_p(p)
    return np.linspace(-pp / 2, 1.5 * pp, n)


def test_pi_p_values():
    assert pi_p(2) == math.pi
    assert pi_p(4) == pytest.approx(math.pi / math.sqrt(2), rel=1e-15)
    assert pi_p(1.5) == pytest.approx(2 * math.pi / (1.5 * math.sin(2 * math.pi / 3)), rel=1e-15)
    assert pi_p(1.5) == pytest.approx(4.8367983046, abs=1e-10)


@pytest.mark.parametrize("p", P_GRID + (4.0,))
def test_pi_p_against_quadrature(p):
    assert abs(pi_p_quadrature(p) - pi_p(p)) / pi_p(p) < 1e-10
    pi_p(p, debug=True)


@pytest.mark.parametrize("bad", [1.0, 1.0 + 1e-10, 0.5, -2, 1e6, float("nan"), float("inf")])
def test_rejects_bad_exponent(bad):
    with pytest.raises(ValidationError):
        pi_p(bad)
    with pytest.raises(ValidationError):
        sin_p(0.1, bad)


def test_debug_mode_raises_on_disagreement(monkeypatch):
    import pspectral.ptrig as mod

    monkeypatch.setattr(mod, "pi_p_quadrature", lambda p: 3.0)
    with pytest.raises(CrossCheckFailure):
        mod.pi_p(2.0, debug=True)


def test_simple_values():
    for p in (1.3, 2.0, 3.0, 9.0):
        assert sin_p(0.0, p) == 0.0
        assert cos_p(0.0, p) == 1.0
        assert sin_p(pi_p(p) / 2, p) == 1.0
    assert sin_p(math.pi / 6, 2) == pytest.approx(0.5, abs=1e-15)
    s, c = 0.0, 0.0
    s, c = sincos_p(0.3, 3)
    assert abs(abs(s) ** 3 + abs(c) ** 3 - 1) < 1e-10


def test_matches_circular_functions():
    t = np.linspace(-7, 7, 1001)
    assert np.max(np.abs(sin_p(t, 2) - np.sin(t))) < 1e-14
    assert np.max(np.abs(cos_p(t, 2) - np.cos(t))) < 1e-14


@pytest.mark.parametrize("p", P_GRID)
def test_pythagorean_identity(p):
    s, c = sincos_p(grid(p), p)
    assert np.max(np.abs(np.abs(s) ** p + np.abs(c) ** p - 1)) < 1e-9


@pytest.mark.parametrize("p", P_GRID)
def test_reflection_and_period(p):
    t = grid(p)
    pp = pi_p(p)
    assert np.max(np.abs(sin_p(pp - t, p) - sin_p(t, p))) < 1e-10
    assert np.max(np.abs(sin_p(t + 2 * pp, p) - sin_p(t, p))) < 1e-10
    assert np.max(np.abs(sin_p(-t, p) + sin_p(t, p))) < 1e-10


@pytest.mark.parametrize("p", P_GRID)
def test_derivative_is_cos(p):
    t = grid(p)
    h = 1e-6
    fd = (sin_p(t + h, p) - sin_p(t - h, p)) / (2 * h)
    c = cos_p(t, p)
    mask = np.abs(c) > 0.1
    assert np.max(np.abs(fd - c)[mask]) < 1e-6


@pytest.mark.parametrize("p", P_GRID)
def test_cos_sign_convention(p):
    pp = pi_p(p)
    assert np.all(cos_p(np.linspace(-pp / 2, pp / 2, 101), p) >= 0)
    # 3 pi_p/2 itself is the start of the next period
    assert np.all(cos_p(np.linspace(pp / 2, 1.5 * pp, 101)[:-1], p) <= 0)


def test_cos_relative_accuracy_near_zero():
    # |cos_p|^p near pi_p/2 equals the complementary integral, no cancellation
    p = 3.0
    pp = pi_p(p)
    g = 1e-9
    c = cos_p(pp / 2 - g, p)
    # pi_p/2 - F(x) ~ V^(1-1/p)/(p-1) for small V = |cos_p|^p
    assert c ** (p - 1) / (p - 1) == pytest.approx(g, rel=1e-6)


@pytest.mark.parametrize("p,t", [(1.5, 0.4), (2.5, 1.0), (3.0, 0.9), (7.0, 1.0), (1.2, 1.7)])
def test_sin_p_against_quadrature_oracle(p, t):
    assert abs(sin_p(t, p) - oracles.sin_p_quadrature(t, p)) < 1e-12


def test_tan_arctan_roundtrip():
    assert arctan_p(tan_p(0.4, 2.5), 2.5) == pytest.approx(0.4, abs=1e-14)
    x = np.linspace(-20, 20, 81)
    assert np.max(np.abs(tan_p(arctan_p(x, 3.0), 3.0) - x)) < 1e-11 * 20


@pytest.mark.parametrize("p,x", [(2.5, 0.7), (1.5, 3.0), (4.0, -2.0), (2.0, 10.0)])
def test_arctan_against_quadrature(p, x):
    assert abs(arctan_p(x, p) - oracles.arctan_p_quadrature(x, p)) < 1e-12


def test_arctan_limits_and_derivative():
    p = 3.0
    assert arctan_p(np.inf, p) == pi_p(p) / 2
    assert arctan_p(-np.inf, p) == -pi_p(p) / 2
    x = np.linspace(-3, 3, 61)
    h = 1e-6
    fd = (arctan_p(x + h, p) - arctan_p(x - h, p)) / (2 * h)
    assert np.max(np.abs(fd - 1 / (1 + np.abs(x) ** p))) < 1e-8


def test_tan_pole():
    with pytest.raises(PoleError):
        tan_p(pi_p(3) / 2, 3)
    with pytest.raises(ZeroDivisionError):
        tan_p(np.array([0.1, pi_p(2.0) / 2 * 3]), 2.0)


def test_reduce_angle_range():
    p = 2.7
    pp = pi_p(p)
    t = np.linspace(-50, 50, 1001)
    r = reduce_angle(t, p)
    assert np.all(r >= -pp / 2) and np.all(r < 1.5 * pp)
    assert np.allclose(sin_p(r, p), sin_p(t, p), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(p=st.floats(1.05, 20.0), t=st.floats(-100.0, 100.0))
def test_identity_property(p, t):
    s, c = sincos_p(t, p)
    assert abs(abs(s) ** p + abs(c) ** p - 1) < 1e-12


@settings(max_examples=60, deadline=None)
@given(p=st.floats(1.05, 20.0), frac=st.floats(-0.999, 0.999))
def test_arctan_inverts_tan_property(p, frac):
    th = frac * pi_p(p) / 2
    assert arctan_p(tan_p(th, p), p) == pytest.approx(th, abs=1e-13)
