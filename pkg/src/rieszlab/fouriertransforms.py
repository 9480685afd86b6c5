"""Closed-form Fourier transforms of the Riesz kernels and related measures.

The transform of A_r at |xi| is

    hat A_r(xi) = 2^(n/2-s) Gamma(n/2)/Gamma(s) * int_{2 pi r|xi|}^inf t^(s-n/2) J_(n/2-1+s)(t) dt,

and an integration by parts gives the second form with n int t^(s-n/2-1)
J_(n/2+s) minus a boundary term.  The same boundary-term form defines the
analytic family K_z.
"""
from __future__ import annotations

import cmath
import math
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DomainError, FitError
from .oscquad import (DEFAULT_QUAD, NO_SINGULARITY, OscIntegralSpec, QuadConfig,
                      SingularitySpec, bessel_tail, bessel_tail_many, integrate_finite,
                      oscillatory_tail)
from .params import FracParam, sphere_area
from .records import VerificationRecord
from .specfun import as_complex, bessel_j, hyp_pfq, jv, loggamma, rgamma


class FtForm(str, Enum):
    PRIMARY_INTEGRAL = "primary_integral"
    BY_PARTS = "by_parts"


def _prefactor(n: int, s) -> complex:
    return 2.0 ** (n / 2 - s) * math.gamma(n / 2) * complex(rgamma(s))


def ft_riesz(p: FracParam, xi_norm, form: FtForm | str = FtForm.PRIMARY_INTEGRAL,
             cfg: QuadConfig = DEFAULT_QUAD):
    """hat A_r^(s) at |xi| = xi_norm (scalar or array); equal to 1 at the origin."""
    form = FtForm(form)
    xs = np.asarray(xi_norm, dtype=float)
    if np.any(xs < 0) or not np.all(np.isfinite(xs)):
        raise DomainError("xi_norm must be finite and non-negative")
    n, s = p.n, p.s
    a = 2 * math.pi * p.r * xs.ravel()
    pref = _prefactor(n, s).real
    if form is FtForm.PRIMARY_INTEGRAL:
        tail = bessel_tail_many(s - n / 2, n / 2 - 1 + s, a, cfg)
        out = pref * np.real(tail)
    else:
        tail = np.real(bessel_tail_many(s - n / 2 - 1, n / 2 + s, a, cfg))
        bt = np.zeros(a.shape)
        pos = a > 0
        bt[pos] = a[pos] ** (s - n / 2) * np.real(jv(n / 2 + s, a[pos]))
        out = pref * (n * tail - bt)
    out = np.where(a == 0, 1.0, out).reshape(xs.shape)
    return float(out) if xs.ndim == 0 else out


def kz_kernel(z, n: int, xi_norm, cfg: QuadConfig = DEFAULT_QUAD):
    """K_z(xi) for -(n+1)/2 < Re z < 1 (boundary-term form), scalar or array xi > 0."""
    z = as_complex(z, "z")
    if not (-(n + 1) / 2 < z.real < 1):
        raise DomainError(f"Re z = {z.real:g} outside (-(n+1)/2, 1)")
    xs = np.asarray(xi_norm, dtype=float)
    if np.any(xs <= 0) or not np.all(np.isfinite(xs)):
        raise DomainError("xi_norm must be positive")
    a = 2 * math.pi * xs.ravel()
    nu = n / 2 + 1 - z
    pref = 2.0 ** (n / 2 - 1 + z) * math.gamma(n / 2) * complex(rgamma(1 - z))
    tail = np.asarray(bessel_tail_many(-z - n / 2, nu, a, cfg), dtype=complex)
    bt = a ** (-(n / 2 - 1 + z)) * jv(nu, a)
    out = (pref * (n * tail - bt)).reshape(xs.shape)
    if z.imag == 0:
        out = out.real
    return out[()] if xs.ndim == 0 else out


def k0_kernel(y: float, n: int, xi_norm, cfg: QuadConfig = DEFAULT_QUAD):
    """K_z on the line Re z = -(n-1)/2, written out in y (z = -(n-1)/2 + iy)."""
    xs = np.asarray(xi_norm, dtype=float)
    if np.any(xs <= 0):
        raise DomainError("xi_norm must be positive")
    a = 2 * math.pi * xs.ravel()
    nu = n + 0.5 - 1j * y
    pref = 2.0 ** (-0.5 + 1j * y) * math.gamma(n / 2) * complex(rgamma((n + 1) / 2 - 1j * y))
    tail = np.asarray(bessel_tail_many(-0.5 - 1j * y, nu, a, cfg), dtype=complex)
    bt = a ** (0.5 - 1j * y) * jv(nu, a)
    out = (pref * (n * tail - bt)).reshape(xs.shape)
    return out[()] if xs.ndim == 0 else out


def k0_tail_bound(y: float, n: int, xi_min: float) -> float:
    """Heuristic bound for |K_(-(n-1)/2+iy)(xi)| on |xi| >= xi_min.

    Built from the leading Hankel term of J_(n+1/2-iy), whose modulus is at
    most sqrt(2/(pi t)) cosh(pi y/2), with a first-order correction
    |4 nu^2 - 1|/(8t), and an integration by parts for the tail integral.
    """
    t0 = 2 * math.pi * xi_min
    nu = n + 0.5 - 1j * y
    h = abs(4 * nu * nu - 1) / (8 * t0)
    env = math.sqrt(2 / math.pi) * math.cosh(math.pi * y / 2) * (1 + h)
    pref = 2.0**-0.5 * math.gamma(n / 2) * abs(complex(rgamma((n + 1) / 2 - 1j * y)))
    return pref * env * (1 + n * (2 + abs(y)) / t0)


def sphere_ft(n: int, xi_norm):
    """Transform of the surface measure of the unit sphere: 2 pi |xi|^(1-n/2) J_(n/2-1)(2 pi |xi|)."""
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2")
    xs = np.asarray(xi_norm, dtype=float)
    if np.any(xs < 0):
        raise DomainError("xi_norm must be non-negative")
    flat = xs.ravel()
    out = np.full(flat.shape, sphere_area(n))
    pos = flat > 0
    out[pos] = 2 * math.pi * flat[pos] ** (1 - n / 2) * np.real(jv(n / 2 - 1, 2 * math.pi * flat[pos]))
    out = out.reshape(xs.shape)
    return float(out) if xs.ndim == 0 else out


def bochner_riesz_ft(z: float, n: int, xi_norm):
    """Transform of (1 - |x|^2)_+^z / Gamma(z+1): pi^-z |xi|^-(n/2+z) J_(n/2+z)(2 pi |xi|).

    At xi_norm = 0 the limit pi^(n/2) / Gamma(n/2 + z + 1) is returned.
    """
    if not z > -1:
        raise DomainError("z must exceed -1")
    xs = np.asarray(xi_norm, dtype=float)
    if np.any(xs < 0):
        raise DomainError("xi_norm must be non-negative")
    flat = xs.ravel()
    out = np.full(flat.shape, math.pi ** (n / 2) / math.gamma(n / 2 + z + 1))
    pos = flat > 0
    x = flat[pos]
    out[pos] = math.pi ** (-z) * x ** (-(n / 2 + z)) * np.real(jv(n / 2 + z, 2 * math.pi * x))
    out = out.reshape(xs.shape)
    return float(out) if xs.ndim == 0 else out


def limit_s_to_1(n: int, xi_norm: float, s_seq: Sequence[float] = (0.9, 0.99, 0.999),
                 cfg: QuadConfig = DEFAULT_QUAD, tol: float = 5e-3) -> VerificationRecord:
    """Gap between hat A_1^(s)(xi) and the normalized sphere transform along s -> 1.

    Passes when the gaps decrease strictly along ``s_seq`` (or are all at
    round-off level) and the final gap is below ``tol``.
    """
    s_seq = [float(v) for v in s_seq]
    if any(not 0 < v < 1 for v in s_seq) or any(b <= a for a, b in zip(s_seq, s_seq[1:])):
        raise DomainError("s_seq must increase inside (0, 1)")
    target = sphere_ft(n, xi_norm) / sphere_area(n)
    gaps = [abs(ft_riesz(FracParam(s, n), xi_norm, FtForm.PRIMARY_INTEGRAL, cfg) - target)
            for s in s_seq]
    floor = 10 * cfg.abs_tol
    monotone = all(b < a or max(a, b) <= floor for a, b in zip(gaps, gaps[1:]))
    ok = monotone and gaps[-1] < tol
    return VerificationRecord("limit_s_to_1", "sphere-limit", gaps[-1], 0.0, gaps[-1], math.inf,
                              tol, ok, "abs", f"n={n} xi={xi_norm:g} monotone={monotone}",
                              {"s": s_seq, "gaps": gaps})


def octave_envelope(func, lo: float, hi: float, per_octave: int = 16, period: float | None = None,
                    per_period: int = 8):
    """Per-octave maxima of |func| on [lo, hi]; returns (locations, maxima).

    Each octave gets ``per_octave`` log-spaced samples, raised to at least
    ``per_period`` samples per oscillation when ``period`` is given so the
    maxima are not aliased.
    """
    n_oct = int(math.floor(math.log2(hi / lo) + 1e-9))
    if n_oct < 1:
        raise DomainError("range must span at least one octave")
    grids = []
    for k in range(n_oct):
        a = lo * 2.0**k
        m = per_octave
        if period is not None:
            m = max(m, int(math.ceil(per_period * a / period)))
        grids.append(a * 2.0 ** (np.arange(m + 1) / m))
    vals = np.abs(np.asarray(func(np.concatenate(grids))))
    xs, ms = [], []
    pos = 0
    for g in grids:
        v = vals[pos:pos + len(g)]
        pos += len(g)
        j = int(np.argmax(v))
        xs.append(g[j])
        ms.append(v[j])
    return np.array(xs), np.array(ms)


def fit_loglog(x, y, max_resid: float = 0.15):
    """Least-squares slope of log y against log x; FitError on large residuals."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    if rms > max_resid:
        raise FitError(f"log-log fit residual {rms:.3g} exceeds {max_resid:g}")
    return float(coef[0]), float(coef[1]), rms


def decay_exponent_fit(p: FracParam, xi_range=(10.0, 1000.0), cfg: QuadConfig = DEFAULT_QUAD,
                       per_octave: int = 16, max_resid: float = 0.15, return_envelope: bool = False):
    """Slope of log(per-octave max |hat A_1^(s)|) against log |xi|.

    ``xi_range`` is (lo, hi) or a geometric grid whose ends are used; it must
    span two decades and reach at least 50.  With ``return_envelope`` the
    result is (slope, locations, maxima).
    """
    lo, hi = float(np.min(xi_range)), float(np.max(xi_range))
    if hi / lo < 100 or hi < 50:
        raise DomainError("xi_range must span two decades with max >= 50")
    # hat A oscillates like cos(2 pi r |xi| + phase): period 1/r in |xi|
    xs, env = octave_envelope(lambda x: ft_riesz(p, x, FtForm.BY_PARTS, cfg), lo, hi, per_octave,
                              period=1.0 / p.r)
    slope = fit_loglog(xs, env, max_resid)[0]
    return (slope, xs, env) if return_envelope else slope


# ---------------------------------------------------------------------------
# identity checks


def singular_bessel_integral(phi, e: float, nu, c: float, cfg: QuadConfig = DEFAULT_QUAD):
    """int_1^inf (rho - 1)^e phi(rho) J_nu(c rho) d rho for smooth phi and -1 < e <= 0.

    The piece next to rho = 1 uses the factored singular substitution, the
    middle is adaptive and the oscillatory tail is block-accelerated.
    """
    amp = lambda r: (r - 1.0) ** e * np.asarray(phi(r), dtype=complex)
    x0, tail, _ = oscillatory_tail(amp, nu, c, 2.0, cfg)
    w = min(1.0, math.pi / c, x0 - 1.0)
    reg = lambda r, d: np.asarray(phi(r), dtype=complex) * jv(nu, c * r)
    head = integrate_finite(reg, 1.0, 1.0 + w, SingularitySpec("left", e), cfg, factored=True)
    if 1.0 + w < x0:
        f = lambda r: amp(r) * jv(nu, c * r)
        npieces = max(1, int(math.ceil((x0 - 1 - w) * c / math.pi)))
        head += integrate_finite(f, 1.0 + w, x0, NO_SINGULARITY, cfg, n_init=min(npieces, 400))
    return complex(head) + tail


def tail_1f2_closed_form(alpha, beta, nu, c):
    """Closed form (two 1F2 terms) of int_1^inf rho^(alpha-1) (rho^2-1)^(beta-1) J_nu(c rho) d rho."""
    alpha, beta, nu = (as_complex(v) for v in (alpha, beta, nu))
    h = (alpha + nu) / 2
    z = -(c / 2) ** 2
    g = cmath.exp
    t1 = (c**nu * g(loggamma(beta) + loggamma(1 - beta - h)) * rgamma(nu + 1) * rgamma(1 - h)
          / 2 ** (nu + 1)) * hyp_pfq([h], [nu + 1, h + beta], z)
    t2 = (2 ** (alpha + 2 * beta - 3) * c ** (2 - alpha - 2 * beta) * g(loggamma(beta + h - 1))
          * rgamma(2 - beta + (nu - alpha) / 2)) * hyp_pfq([1 - beta], [2 - beta - h, 2 - beta + (nu - alpha) / 2], z)
    return complex(t1 + t2)


def tail_1f2_identity_check(alpha, beta, nu, c: float, cfg: QuadConfig = DEFAULT_QUAD,
                            tol: float = 1e-7) -> VerificationRecord:
    """Direct quadrature of the rho-integral against its two-term 1F2 closed form."""
    alpha, beta, nu = (as_complex(v) for v in (alpha, beta, nu))
    if not beta.real > 0 or not (alpha + 2 * beta).real < 3.5:
        raise DomainError("need Re beta > 0 and Re(alpha + 2 beta) < 7/2")
    if beta.imag != 0:
        raise DomainError("quadrature side supports real beta only")
    e = beta.real - 1.0
    if e <= 0:
        phi = lambda r: r ** (alpha - 1) * (r + 1.0) ** e
        lhs = singular_bessel_integral(phi, e, nu, c, cfg)
    else:
        phi = lambda r: r ** (alpha - 1) * (r * r - 1.0) ** e
        lhs = singular_bessel_integral(phi, 0.0, nu, c, cfg)
    rhs = tail_1f2_closed_form(alpha, beta, nu, c)
    return VerificationRecord.compare("tail_1f2_identity", "bessel-hypergeometric-tail", lhs, rhs,
                                      tol, "abs_or_rel",
                                      note=f"alpha={alpha}, beta={beta}, nu={nu}, c={c:g}")


def kernel_bessel_lhs(n: int, s: float, c: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """int_1^inf rho^(-n/2) (rho^2 - 1)^(-s) J_(n/2-1)(c rho) d rho by quadrature."""
    phi = lambda r: r ** (-n / 2) * (r + 1.0) ** (-s)
    return singular_bessel_integral(phi, -s, n / 2 - 1, c, cfg).real


def kernel_bessel_rhs(n: int, s: float, c: float, cfg: QuadConfig = DEFAULT_QUAD,
             gamma_variant: bool = False) -> float:
    """Gamma(1-s) c^(n/2-1) {Gamma(s)/(2^(n/2) Gamma(n/2)) - k int_0^c t^(s-n/2) J_(n/2-1+s)(t) dt}.

    k = 2^-s, the value that closes the identity; ``gamma_variant`` uses the variant
    k = 1/(2^s Gamma(s)) for comparison.
    """
    mu, nu = s - n / 2, n / 2 - 1 + s
    f = lambda t: t**mu * np.real(jv(nu, t))
    e = min(0.0, 2 * s - 1)
    head = integrate_finite(f, 0.0, min(c, 1.0), SingularitySpec("left", e) if e < 0 else NO_SINGULARITY, cfg)
    if c > 1.0:
        head += integrate_finite(f, 1.0, c, NO_SINGULARITY, cfg, n_init=max(1, int(c)))
    k = 2.0**-s
    if gamma_variant:
        k /= math.gamma(s)
    return math.gamma(1 - s) * c ** (n / 2 - 1) * (math.gamma(s) / (2 ** (n / 2) * math.gamma(n / 2)) - k * head)


def kernel_bessel_identity_check(n: int, s: float, r: float, xi_norm: float, cfg: QuadConfig = DEFAULT_QUAD,
                        tol: float = 1e-7) -> VerificationRecord:
    c = 2 * math.pi * r * xi_norm
    lhs = kernel_bessel_lhs(n, s, c, cfg)
    rhs = kernel_bessel_rhs(n, s, c, cfg)
    alt = kernel_bessel_rhs(n, s, c, cfg, gamma_variant=True)
    return VerificationRecord.compare("kernel_bessel_identity", "kernel-bessel-integral", lhs, rhs, tol,
                                      "abs_or_rel", note=f"n={n} s={s:g} c={c:g}",
                                      extra={"gap_with_gamma_variant": abs(lhs - alt)})


def kernel_bessel_via_1f2(n: int, s: float, c: float) -> float:
    """Right-hand side of the kernel Bessel integral obtained from the 1F2 closed form."""
    return tail_1f2_closed_form(1 - n / 2, 1 - s, n / 2 - 1, c).real


def power_moment_identity_check(mu, nu, cfg: QuadConfig = DEFAULT_QUAD, tol: float = 1e-8) -> VerificationRecord:
    """bessel_tail from 0 against the Weber-Schafheitlin closed form."""
    from .specfun import weber_schafheitlin

    num = bessel_tail(OscIntegralSpec(mu, nu, 0.0), cfg)
    ref = weber_schafheitlin(mu, nu, 1.0)
    rec = VerificationRecord.compare("weber_schafheitlin", "bessel-power-moment", num, ref,
                                     tol * (1 + abs(ref)), "abs", note=f"mu={mu}, nu={nu}")
    return rec


def riesz_ft_oracle(p: FracParam, xi_norm: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """hat A_r by direct Bochner quadrature of the kernel (independent of the closed form)."""
    from .oscquad import bochner_radial_ft
    from .rieszkernel import kernel_profile

    return float(np.real(bochner_radial_ft(kernel_profile(p), p.n, xi_norm, cfg)))
