"""Riesz mean kernels and the averaging operators built from them.

For 0 < s < 1 the kernel

    A_r(x) = c(n, s) r^(2s) / ((|x|^2 - r^2)_+^s |x|^n),
    c(n, s) = 2 / (Gamma(s) Gamma(1 - s) sigma_(n-1)),

is a probability density supported outside the ball of radius r.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import DomainError, NoConvergence, PoleError
from .oscquad import (DEFAULT_QUAD, NO_SINGULARITY, QuadConfig, SingularitySpec,
                      integrate_finite)
from .params import FracParam, RadialProfile, sphere_area
from .specfun import as_complex, rgamma


def kernel_constant(p, n: int | None = None):
    """c(n, s) = 2 / (Gamma(s) Gamma(1-s) sigma_(n-1)).

    ``p`` is a FracParam, or a (possibly complex) order z together with
    ``n``.  The product is commutative in floating point, so c(n, z) =
    c(n, 1 - z) holds bit for bit whenever 1 - z is computed exactly (dyadic z);
    otherwise the two inputs already differ by an ulp.
    """
    if isinstance(p, FracParam):
        z, n = complex(p.s), p.n
    else:
        if n is None:
            raise DomainError("dimension n is required with a bare order")
        z = as_complex(p, "z")
    if z.imag == 0 and z.real == round(z.real):
        raise PoleError(f"c(n, s) is undefined at the integer order {z.real:g}")
    val = 2.0 * complex(rgamma(z)) * complex(rgamma(1.0 - z)) / sphere_area(n)
    return val.real if z.imag == 0 else val


def eval_kernel(p: FracParam, radius):
    """A_r(x) at |x| = radius; zero on the closed ball of radius r."""
    rad = np.asarray(radius, dtype=float)
    if np.any(rad < 0):
        raise DomainError("radius must be non-negative")
    c = kernel_constant(p)
    out = np.zeros(rad.shape)
    m = rad > p.r
    x = rad[m]
    out[m] = c * p.r ** (2 * p.s) / ((x * x - p.r * p.r) ** p.s * x**p.n)
    return out[()] if rad.ndim == 0 else out


def _kernel_offset(p: FracParam, d):
    """A_r at radius r + d for d > 0, with |x|^2 - r^2 formed as d (2r + d)."""
    d = np.asarray(d, dtype=float)
    c = kernel_constant(p)
    r = p.r
    with np.errstate(divide="ignore"):
        out = c * r ** (2 * p.s) / ((d * (2 * r + d)) ** p.s * (r + d) ** p.n)
    return np.where(d > 0, out, 0.0)


def kernel_profile(p: FracParam) -> RadialProfile:
    """The kernel as a RadialProfile (singular like (rho - r)^-s at rho = r)."""
    return RadialProfile(lambda r: eval_kernel(p, r), "poly", p.n + 2 * p.s,
                         singular_at=(p.r, -p.s), support_start=p.r,
                         label=f"A(s={p.s:g},n={p.n})",
                         offset_func=lambda d: _kernel_offset(p, d))


def kernel_mass(p: FracParam, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Total mass sigma_(n-1) * int_r^inf A_r(rho) rho^(n-1) d rho (should be 1)."""
    r = p.r

    def f(rho):
        return eval_kernel(p, rho) * rho ** (p.n - 1)

    c = kernel_constant(p)

    def f_reg(rho, d):
        return c * r ** (2 * p.s) * (2 * r + d) ** (-p.s) / rho

    head = integrate_finite(f_reg, r, 2 * r, SingularitySpec("left", -p.s), cfg, factored=True)

    # rho = 2r/u maps (2r, inf) onto (0, 1); the integrand behaves like u^(2s-1)
    def g(u):
        rho = 2 * r / u
        return f(rho) * 2 * r / (u * u)

    tail = integrate_finite(g, 0.0, 1.0, SingularitySpec("left", min(0.0, 2 * p.s - 1)), cfg)
    return sphere_area(p.n) * (head + tail)


def _check_admissible(p: FracParam, f: RadialProfile):
    if f.decay == "poly" and not float(f.decay_param) > -2 * p.s:
        raise DomainError(f"profile growth r^{-f.decay_param:g} is not integrable against "
                          f"the kernel tail r^-(n+2s)")


def _outer_limit(f: RadialProfile, tol: float) -> float:
    if f.decay == "compact":
        return f.outer_radius
    if f.decay == "schwartz":
        r = 1.0
        for _ in range(80):
            probe = r * np.array([1.0, 1.3, 1.7, 2.0])
            if np.all(np.abs(f(probe)) < tol * 1e-4):
                return r
            r *= 1.4
        raise DomainError("Schwartz profile does not decay numerically")
    return math.inf


def _radial_against_kernel(p: FracParam, h, outer: float, cfg: QuadConfig) -> float:
    """sigma c int_1^inf (tau^2 - 1)^(-s) tau^(-1) h(r tau) d tau."""
    s, r = p.s, p.r

    def w(tau):
        return (tau * tau - 1.0) ** (-s) / tau * h(r * tau)

    def w_reg(tau, d):
        # regular part: (tau^2 - 1)^(-s) = d^(-s) (2 + d)^(-s)
        return (2.0 + d) ** (-s) / tau * h(r * tau)

    total = integrate_finite(w_reg, 1.0, 2.0, SingularitySpec("left", -s), cfg, factored=True)
    t_out = outer / r
    if t_out > 2.0:
        if math.isfinite(t_out):
            total += integrate_finite(w, 2.0, t_out, NO_SINGULARITY, cfg,
                                      n_init=max(1, int(t_out)))
        else:
            def g(u):
                tau = 2.0 / u
                return w(tau) * 2.0 / (u * u)

            total += integrate_finite(g, 0.0, 1.0, SingularitySpec("left", max(-0.99, min(0.0, 2 * s - 1))), cfg)
    return sphere_area(p.n) * kernel_constant(p) * total


def spherical_mean(f: RadialProfile, center_norm: float, r: float,
                   cfg: QuadConfig = DEFAULT_QUAD, n: int = 2):
    """Average of a radial f over the sphere of radius r about a point at distance d.

    For n >= 2 this is (sigma_(n-2)/sigma_(n-1)) times the integral over
    theta in (0, pi) of f(sqrt(d^2 + r^2 - 2 d r cos theta)) sin^(n-2) theta.
    """
    if not r > 0:
        raise DomainError("sphere radius must be positive")
    d = float(center_norm)
    if d == 0.0:
        return float(np.asarray(f(np.array([r])))[0])
    return float(np.real(_sphere_avg(f, d, np.array([r]), n, cfg)[0]))


def _sphere_weight(n: int) -> float:
    return (2.0 if n == 2 else sphere_area(n - 1)) / sphere_area(n)


def _sphere_avg(f, d, radii, n, cfg, nodes: int | None = None):
    if nodes is None:
        out = np.empty(len(radii))
        for i, rho in enumerate(radii):
            def g(th, rho=rho):
                return f(np.sqrt(np.maximum(d * d + rho * rho - 2 * d * rho * np.cos(th), 0.0))) \
                    * np.sin(th) ** (n - 2)
            out[i] = np.real(integrate_finite(g, 0.0, math.pi, NO_SINGULARITY, cfg, n_init=4))
        return out * _sphere_weight(n)
    x, wts = np.polynomial.legendre.leggauss(nodes)
    th = 0.5 * math.pi * (x + 1.0)
    wts = 0.5 * math.pi * wts
    rr = np.sqrt(np.maximum(d * d + radii[:, None] ** 2 - 2 * d * radii[:, None] * np.cos(th)[None, :], 0.0))
    vals = np.asarray(f(rr.ravel())).reshape(rr.shape) * np.sin(th)[None, :] ** (n - 2)
    return (vals @ wts) * _sphere_weight(n)


def mean_operator(p: FracParam, f: RadialProfile, center_norm: float = 0.0,
                  cfg: QuadConfig = DEFAULT_QUAD, *, angular_nodes: int = 96) -> float:
    """(A_r * f)(x) for radial f at a point with |x| = center_norm.

    At the origin this is a 1-D integral against the kernel.  Off-center the
    convolution is written as sigma_(n-1) int_r^inf A_r(rho) rho^(n-1)
    M_rho(f, x) d rho with the spherical mean computed by Gauss-Legendre in
    the angle.
    """
    _check_admissible(p, f)
    d = float(center_norm)
    if d < 0:
        raise DomainError("center_norm must be non-negative")
    outer = _outer_limit(f, cfg.abs_tol)
    if d == 0.0:
        return float(np.real(_radial_against_kernel(p, f, outer, cfg)))

    def h(rho):
        rho = np.asarray(rho, dtype=float)
        return _sphere_avg(f, d, rho.ravel(), p.n, cfg, angular_nodes).reshape(rho.shape)

    return float(np.real(_radial_against_kernel(p, h, outer + d, cfg)))


def riesz_solution_center(p: FracParam, g: RadialProfile, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Value at the center of the ball of Riesz's solution with exterior data g.

    At x = 0 the Poisson-type kernel c (r^2/(|y|^2 - r^2))^s |y|^-n is
    exactly A_r(y), so the value equals the mean operator at the origin.
    """
    return mean_operator(p, g, 0.0, cfg)


def bp_constant(n: int, s: float) -> float:
    """gamma(n, s) = s 2^(2s) Gamma(n/2 + s) / (pi^(n/2) Gamma(1 - s))."""
    return s * 4.0**s * math.gamma(n / 2 + s) / (math.pi ** (n / 2) * math.gamma(1 - s))


def bp_scale(n: int, s: float) -> float:
    """Factor turning the limit of (A_r f - f)/r^(2s) into -(-Delta)^s f.

    Computed from the small-|xi| behaviour of the kernel transform,
    1 - hat A_1(xi) ~ Gamma(n/2) (2 pi |xi|)^(2s) / (s Gamma(s) 4^s Gamma(n/2+s)).
    It equals gamma(n, s) / c(n, s).
    """
    return s * math.gamma(s) * 4.0**s * math.gamma(n / 2 + s) / math.gamma(n / 2)


def richardson(values: Sequence[float], ratios: Sequence[float], powers: Sequence[float]):
    """Richardson table for values v_i ~ L + sum_j a_j h_i^(powers[j]).

    ``ratios[i]`` is h_(i-1)/h_i.  Returns the table as a list of rows.
    """
    table = [[float(v)] for v in values]
    for i in range(1, len(values)):
        for j in range(1, i + 1):
            if j - 1 >= len(powers):
                break
            fac = ratios[i] ** powers[j - 1]
            prev = table[i][j - 1]
            table[i].append(prev + (prev - table[i - 1][j - 1]) / (fac - 1.0))
    return table


def blaschke_privalov(p: FracParam, f: RadialProfile, center_norm: float = 0.0,
                      r_seq: Sequence[float] = (0.2, 0.1, 0.05, 0.025),
                      cfg: QuadConfig = DEFAULT_QUAD, *, tol: float = 1e-3,
                      use_gamma_constant: bool = False) -> float:
    """Estimate (-Delta)^s f(x) from (A_r f(x) - f(x)) / r^(2s) as r -> 0.

    The quotient has an expansion L + a r^2 + b r^4 + ... for smooth f, so the
    sequence is extrapolated in even powers of r.  The limit is scaled by
    ``bp_scale`` (or by gamma(n, s) itself when ``use_gamma_constant``).
    Raises NoConvergence when the last two diagonal extrapolants differ by
    more than ``tol`` (relative, with an absolute floor of 1e-8).
    """
    r_seq = [float(v) for v in r_seq]
    if len(r_seq) < 4:
        raise DomainError("r_seq needs at least 4 terms")
    if any(b >= a for a, b in zip(r_seq, r_seq[1:])) or r_seq[-1] <= 0:
        raise DomainError("r_seq must be positive and strictly decreasing")
    d = float(center_norm)
    if d == 0.0:
        f0 = float(np.asarray(f(np.array([0.0])))[0])
    else:
        f0 = float(np.asarray(f(np.array([d])))[0])
    q = []
    for r in r_seq:
        pr = FracParam(p.s, p.n, r)
        q.append((mean_operator(pr, f, d, cfg) - f0) / r ** (2 * p.s))
    ratios = [1.0] + [a / b for a, b in zip(r_seq, r_seq[1:])]
    table = richardson(q, ratios, [2.0 * k for k in range(1, len(q))])
    best, prev = table[-1][-1], table[-2][-1]
    if abs(best - prev) > max(1e-8, tol * abs(best)):
        raise NoConvergence(f"Richardson extrapolants disagree: {best:.6g} vs {prev:.6g}",
                            value=best, error=abs(best - prev))
    k = bp_constant(p.n, p.s) if use_gamma_constant else bp_scale(p.n, p.s)
    return -k * best


def frac_laplacian_multiplier(p: FracParam, fhat: RadialProfile, center_norm: float = 0.0,
                              cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """(-Delta)^s f at |x| = center_norm from the multiplier (2 pi |xi|)^(2s) applied to hat f.

    Independent of the kernel route: a single Bochner integral of the
    radial function (2 pi rho)^(2s) hat f(rho).
    """
    from .oscquad import bochner_radial_ft

    s = p.s
    base = fhat.func
    g = RadialProfile(lambda r: (2 * math.pi * r) ** (2 * s) * base(r), fhat.decay,
                      None if fhat.decay_param is None else fhat.decay_param - 2 * s,
                      label=f"mult({fhat.label})")
    return float(np.real(bochner_radial_ft(g, p.n, float(center_norm), cfg)))


def gaussian_frac_laplacian_origin(n: int, s: float) -> float:
    """(-Delta)^s exp(-pi |x|^2) at 0: sigma (2 pi)^(2s) Gamma(n/2 + s) / (2 pi^(n/2 + s))."""
    return sphere_area(n) * (2 * math.pi) ** (2 * s) * math.gamma(n / 2 + s) / (2 * math.pi ** (n / 2 + s))
