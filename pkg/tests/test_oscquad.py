import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rieszlab.errors import DomainError, NoConvergence
from rieszlab.fouriertransforms import bochner_riesz_ft
from rieszlab.oscquad import (
    DEFAULT_QUAD,
    NO_SINGULARITY,
    OscIntegralSpec,
    QuadConfig,
    SingularitySpec,
    bessel_tail,
    bessel_tail_many,
    bochner_radial_ft,
    integrate_finite,
)
from rieszlab.params import RadialProfile, sphere_area
from rieszlab.specfun import jv, weber_schafheitlin


def test_quadconfig_invariants():
    with pytest.raises(DomainError):
        QuadConfig(abs_tol=0)
    with pytest.raises(DomainError):
        QuadConfig(max_subdiv=4)
    with pytest.raises(DomainError):
        QuadConfig(tail_zero_blocks=2)
    with pytest.raises(DomainError):
        QuadConfig(accel_order=1)


def test_singularity_spec_invariants():
    with pytest.raises(DomainError):
        SingularitySpec("left", -1.0)
    with pytest.raises(DomainError):
        SingularitySpec("middle", -0.5)


def test_power_rule_singular():
    v = integrate_finite(lambda t: t**-0.5, 0.0, 1.0, SingularitySpec("left", -0.5))
    assert v == pytest.approx(2.0, abs=1e-10)


def test_arccosh_closed_form():
    v = integrate_finite(lambda r: (r * r - 1) ** -0.5, 1.0, 2.0, SingularitySpec("left", -0.5))
    assert v == pytest.approx(math.acosh(2.0), abs=1e-10)


def test_sine():
    assert integrate_finite(np.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)


def test_right_endpoint_singularity():
    # the offset form avoids cancellation in 1 - t near the endpoint
    v = integrate_finite(lambda t, d: abs(d) ** -0.75, 0.0, 1.0, SingularitySpec("right", -0.75),
                         pass_offset=True)
    assert v == pytest.approx(4.0, abs=1e-9)


def test_polynomials_exact_with_error_bound():
    rng = np.random.default_rng(3)
    for deg in (5, 12, 20):
        c = rng.normal(size=deg + 1)
        p = np.polynomial.Polynomial(c)
        exact = p.integ()(2.0) - p.integ()(-1.0)
        v, err = integrate_finite(p, -1.0, 2.0, return_error=True)
        assert abs(v - exact) <= max(err, 1e-12 * max(1, abs(exact)))


def test_no_convergence():
    cfg = QuadConfig(abs_tol=1e-15, rel_tol=1e-15, max_subdiv=8)
    with pytest.raises(NoConvergence):
        integrate_finite(lambda t: np.sin(1 / t), 1e-4, 1.0, NO_SINGULARITY, cfg)


def test_oscspec_invariants():
    with pytest.raises(DomainError):
        OscIntegralSpec(0.6, 1.0, 1.0)
    with pytest.raises(DomainError):
        OscIntegralSpec(-2.5, 1.0, 0.0)


def test_bessel_tail_kernel_case():
    n, s = 3, 0.5
    assert bessel_tail(OscIntegralSpec(s - n / 2, n / 2 - 1 + s, 0.0)) == pytest.approx(1.0, abs=1e-9)


def test_bessel_tail_far_out_asymptotics():
    # t^-1/2 J_3/2(t) ~ -sqrt(2/pi) cos(t)/t, so the tail ~ sqrt(2/pi) Ci(X)
    from scipy.special import sici
    for x in (1e3, 1e4, 1e6):
        ref = math.sqrt(2 / math.pi) * sici(x)[1]
        assert abs(bessel_tail(OscIntegralSpec(-0.5, 1.5, x)) - ref) < 5.0 / x**2


def test_bessel_tail_additivity():
    mu, nu, a = -0.7, 2.2, 6.5
    full = bessel_tail(OscIntegralSpec(mu, nu, 0.0))
    head = integrate_finite(lambda t: t**mu * jv(nu, t).real, 0.0, a, SingularitySpec("left", 0.0),
                            n_init=4)
    assert abs(bessel_tail(OscIntegralSpec(mu, nu, a)) - (full - head)) < 1e-8


def test_bessel_tail_many_matches_scalar():
    lowers = np.array([0.0, 0.3, 2.0, 17.5, 80.0])
    many = bessel_tail_many(-0.25, 1.25, lowers)
    single = [bessel_tail(OscIntegralSpec(-0.25, 1.25, x)) for x in lowers]
    np.testing.assert_allclose(many, single, atol=1e-10)


def test_bessel_tail_weber_schafheitlin_random():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        nu = rng.uniform(-0.4, 6.0) + 1j * rng.uniform(-3, 3) * (rng.random() < 0.3)
        lo, hi = -nu.real - 1 + 0.05, 0.45
        mu = rng.uniform(lo, hi)
        closed = weber_schafheitlin(mu, nu, 1.0)
        got = bessel_tail(OscIntegralSpec(mu, nu, 0.0))
        worst = max(worst, abs(got - closed) / (1 + abs(closed)))
    assert worst < 1e-8


def test_block_count_insensitivity():
    spec = OscIntegralSpec(-0.3, 2.5, 3.0)
    a = bessel_tail(spec, QuadConfig(tail_zero_blocks=24))
    b = bessel_tail(spec, QuadConfig(tail_zero_blocks=48))
    assert abs(a - b) < DEFAULT_QUAD.abs_tol


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 5), st.floats(0.0, 4.0))
def test_gaussian_self_dual(n, t):
    v = bochner_radial_ft(RadialProfile.gaussian(), n, t)
    assert v == pytest.approx(math.exp(-math.pi * t * t), abs=1e-10)


def test_mass_at_origin():
    for n in (2, 3, 4):
        g = RadialProfile.gaussian(2.0)
        assert bochner_radial_ft(g, n, 0.0) == pytest.approx((math.pi / 2.0) ** (n / 2), rel=1e-10)


def test_ball_indicator_transform():
    for n in (2, 3):
        for xi in (0.4, 1.7, 3.2):
            v = bochner_radial_ft(RadialProfile.ball_indicator(), n, xi)
            ref = xi ** (-n / 2) * jv(n / 2, 2 * math.pi * xi).real
            assert abs(v - ref) < 1e-7


def test_bochner_riesz_profile():
    for z in (-0.5, 0.5, 1.0):
        for xi in (0.6, 2.3):
            v = bochner_radial_ft(RadialProfile.bochner_riesz(z), 3, xi)
            assert abs(v - bochner_riesz_ft(z, 3, xi)) < 1e-6


def test_non_integrable_profile_rejected():
    with pytest.raises(DomainError):
        bochner_radial_ft(RadialProfile.constant(1.0), 2, 1.0)
    with pytest.raises(DomainError):
        bochner_radial_ft(RadialProfile.gaussian(), 2, -1.0)


def test_sphere_area_values():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


def test_tiny_frequency_continuity():
    # the transform of an integrable profile is continuous at the origin
    g = RadialProfile(lambda r: (1 + r * r) ** -2.5, "poly", 5.0, label="poly")
    for n in (2, 3):
        v0 = bochner_radial_ft(g, n, 0.0)
        assert bochner_radial_ft(g, n, 1e-40) == pytest.approx(v0, rel=1e-12)
        b0 = bochner_radial_ft(RadialProfile.ball_indicator(), n, 0.0)
        assert bochner_radial_ft(RadialProfile.ball_indicator(), n, 1e-9) == pytest.approx(b0, rel=1e-12)
