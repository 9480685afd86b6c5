import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rieszlab.errors import DomainError, NoConvergence, PoleError
from rieszlab.params import FracParam, RadialProfile, sphere_area
from rieszlab.rieszkernel import (
    blaschke_privalov,
    bp_constant,
    bp_scale,
    eval_kernel,
    frac_laplacian_multiplier,
    gaussian_frac_laplacian_origin,
    kernel_constant,
    kernel_mass,
    mean_operator,
    richardson,
    riesz_solution_center,
    spherical_mean,
)


def test_constant_example():
    assert kernel_constant(FracParam(0.5, 2)) == pytest.approx(1 / math.pi**2, rel=1e-14)


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("z", [0.25, 0.375, 0.125 + 1.5j, 0.5 - 3j])
def test_constant_reflection_symmetry_exact(n, z):
    assert kernel_constant(z, n) == kernel_constant(1 - z, n)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(-5, 5), st.integers(2, 6))
def test_constant_reflection_symmetry_rounding(x, y, n):
    z = complex(x, y)
    a, b = kernel_constant(z, n), kernel_constant(1 - z, n)
    assert abs(a - b) <= 1e-14 * abs(a)


def test_constant_poles():
    with pytest.raises(PoleError):
        kernel_constant(1.0, 3)
    with pytest.raises(PoleError):
        kernel_constant(0, 2)
    with pytest.raises(DomainError):
        kernel_constant(0.5)


def test_kernel_vanishes_inside_ball():
    p = FracParam(0.4, 3, 2.0)
    assert np.all(eval_kernel(p, np.linspace(0, 2.0, 11)) == 0)
    assert eval_kernel(p, 2.5) > 0
    with pytest.raises(DomainError):
        eval_kernel(p, -1.0)


def test_kernel_scaling():
    # A_r(x) = r^-n A_1(x / r)
    for r in (0.3, 2.5):
        p1, pr = FracParam(0.6, 3), FracParam(0.6, 3, r)
        x = np.array([1.3, 2.0, 7.0]) * r
        np.testing.assert_allclose(eval_kernel(pr, x), r**-3 * eval_kernel(p1, x / r), rtol=1e-13)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("s", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_normalization_grid(n, s):
    assert abs(kernel_mass(FracParam(s, n)) - 1.0) < 1e-8


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 0.95), st.integers(2, 6), st.floats(0.1, 10.0))
def test_normalization_any_radius(s, n, r):
    assert abs(kernel_mass(FracParam(s, n, r)) - 1.0) < 1e-8


def test_mean_of_constant():
    for s in (0.2, 0.8):
        c = RadialProfile.constant(3.0)
        assert mean_operator(FracParam(s, 2), c) == pytest.approx(3.0, abs=1e-8)


def test_mean_rejects_fast_growth():
    grow = RadialProfile(lambda r: r**2.0, "poly", -2.0)
    with pytest.raises(DomainError):
        mean_operator(FracParam(0.5, 2), grow)


def test_mean_is_contraction():
    g = RadialProfile.gaussian()
    for s in (0.3, 0.7):
        for d in (0.0, 0.5, 1.5):
            v = mean_operator(FracParam(s, 3), g, d)
            assert 0 < v <= 1.0


def test_mean_tends_to_sphere_average_as_s_to_1():
    g = RadialProfile.gaussian()
    target = spherical_mean(g, 0.0, 1.0)
    gaps = [abs(mean_operator(FracParam(s, 2), g) - target) for s in (0.9, 0.99, 0.999)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_spherical_mean_gaussian_closed_form():
    # n = 3: mean of exp(-pi |y|^2) over |y - x| = r, |x| = d
    g = RadialProfile.gaussian()
    for d, r in [(0.5, 0.7), (1.2, 0.3), (2.0, 2.0)]:
        ref = math.exp(-math.pi * (d * d + r * r)) * math.sinh(2 * math.pi * d * r) / (2 * math.pi * d * r)
        assert spherical_mean(g, d, r, n=3) == pytest.approx(ref, rel=1e-9)


def test_spherical_mean_n2_bessel_i0():
    from scipy.special import i0

    g = RadialProfile.gaussian()
    d, r = 0.8, 0.6
    ref = math.exp(-math.pi * (d * d + r * r)) * i0(2 * math.pi * d * r)
    assert spherical_mean(g, d, r, n=2) == pytest.approx(ref, rel=1e-9)


def test_riesz_solution_center_is_mean_at_origin():
    p = FracParam(0.5, 2)
    g = RadialProfile.gaussian(2.0)
    assert riesz_solution_center(p, g) == mean_operator(p, g, 0.0)


def test_bp_constants_relation():
    for n in (2, 3):
        for s in (0.3, 0.5):
            c = kernel_constant(FracParam(s, n))
            assert bp_scale(n, s) * c == pytest.approx(bp_constant(n, s), rel=1e-12)


def test_richardson_even_powers():
    h = np.array([0.2, 0.1, 0.05, 0.025])
    v = 3.0 + 2 * h**2 - 5 * h**4 + h**6
    table = richardson(v, [1.0, 2, 2, 2], [2, 4, 6])
    assert table[-1][-1] == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_blaschke_privalov_gaussian_origin(s):
    for n in (2, 3):
        est = blaschke_privalov(FracParam(s, n), RadialProfile.gaussian())
        ref = gaussian_frac_laplacian_origin(n, s)
        assert abs(est - ref) / ref < 1e-3


def test_blaschke_privalov_off_center_multiplier():
    p = FracParam(0.5, 2)
    g = RadialProfile.gaussian()
    est = blaschke_privalov(p, g, center_norm=0.4)
    ref = frac_laplacian_multiplier(p, g, 0.4)
    assert abs(est - ref) < 1e-3 * abs(ref)


def test_multiplier_oracle_matches_closed_form():
    for n in (2, 3):
        for s in (0.25, 0.75):
            v = frac_laplacian_multiplier(FracParam(s, n), RadialProfile.gaussian())
            assert v == pytest.approx(gaussian_frac_laplacian_origin(n, s), rel=1e-9)


def test_blaschke_privalov_input_validation():
    p, g = FracParam(0.5, 2), RadialProfile.gaussian()
    with pytest.raises(DomainError):
        blaschke_privalov(p, g, r_seq=(0.2, 0.1, 0.05))
    with pytest.raises(DomainError):
        blaschke_privalov(p, g, r_seq=(0.1, 0.2, 0.05, 0.01))


def test_blaschke_privalov_reports_nonconvergence():
    with pytest.raises(NoConvergence):
        blaschke_privalov(FracParam(0.5, 2), RadialProfile.gaussian(), r_seq=(1.6, 1.2, 0.9, 0.7),
                          tol=1e-9)


def test_constant_vanishes_at_the_ends():
    vals = [kernel_constant(FracParam(s, 3)) for s in (1e-2, 1e-4, 1e-6)]
    assert vals[0] > vals[1] > vals[2] > 0 and vals[2] < 1e-6


def test_bp_constant_example():
    assert bp_constant(2, 0.5) == pytest.approx(1 / (2 * math.pi), rel=1e-14)


def test_blaschke_privalov_of_constant():
    assert abs(blaschke_privalov(FracParam(0.4, 2), RadialProfile.constant(2.0))) < 1e-6


def test_spherical_mean_unit_example():
    # center at distance 1, radius 1, n = 2: (1/2pi) int exp(-pi (2 + 2 cos t)) dt = e^(-2 pi) I0(2 pi)
    from scipy.special import i0

    ref = math.exp(-2 * math.pi) * i0(2 * math.pi)
    assert spherical_mean(RadialProfile.gaussian(), 1.0, 1.0, n=2) == pytest.approx(ref, rel=1e-10)
    assert spherical_mean(RadialProfile.constant(1.0), 0.7, 1.3, n=3) == pytest.approx(1.0, abs=1e-12)


def test_contraction_random_bounded_profiles():
    rng = np.random.default_rng(5)
    for _ in range(30):
        a, b, w = rng.uniform(0.2, 3.0), rng.uniform(-1, 1), rng.uniform(0, 6)
        f = RadialProfile(lambda r, a=a, b=b, w=w: (np.cos(w * r) + b) * np.exp(-a * r * r) / (1 + abs(b)),
                          "schwartz")
        sup = np.max(np.abs(f(np.linspace(0, 20, 20001))))
        s, n = rng.uniform(0.05, 0.95), int(rng.integers(2, 5))
        assert abs(mean_operator(FracParam(s, n), f)) <= sup + 1e-9


def test_mean_near_one_close_to_sphere_value():
    # s = 0.99: within 2e-2 of f(r) for a Gaussian
    g = RadialProfile.gaussian()
    assert abs(mean_operator(FracParam(0.99, 3), g) - float(g(1.0))) < 2e-2
