"""Knapp-type experiments, restriction quotients and the Plancherel identity."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import roots_jacobi, zeta

from .errors import DomainError
from .fouriertransforms import FtForm, fit_loglog, ft_riesz
from .oscquad import (DEFAULT_QUAD, NO_SINGULARITY, QuadConfig, SingularitySpec,
                      bochner_radial_ft, integrate_finite)
from .params import FracParam, RadialProfile, sphere_area
from .records import VerificationRecord
from .rieszkernel import eval_kernel, kernel_constant

DEFAULT_EPS_GRID = tuple(2.0**-k for k in range(4, 13))


@dataclass(frozen=True)
class KnappGeometry:
    n: int
    eps: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")
        if not 0 < self.eps < 0.5:
            raise DomainError("eps must lie in (0, 1/2)")

    @property
    def R(self) -> float:
        return math.sqrt(self.eps * (2 - self.eps))

    @property
    def box_volume(self) -> float:
        return self.eps * (2 * self.R) ** (self.n - 1)


@dataclass(frozen=True)
class ExponentPair:
    p: float
    q: float

    def __post_init__(self):
        if not 1 <= self.p <= 2:
            raise DomainError("p must lie in [1, 2]")
        if not self.q >= 1:
            raise DomainError("q must be at least 1")

    @property
    def p_conj(self) -> float:
        return math.inf if self.p == 1 else self.p / (self.p - 1)


# ---------------------------------------------------------------------------
# Knapp mass


@lru_cache(maxsize=64)
def _jacobi_01(s: float, m: int = 24):
    """Nodes and weights for int_0^1 w^-s g(w) dw."""
    x, w = roots_jacobi(m, 0.0, -s)
    return 0.5 * (x + 1.0), w * 2.0 ** (s - 1.0)


def _inner_singular(rho, s, n, exact, m=24):
    """int_b^1 (t^2 - b^2)^-s [(rho^2 + t^2)^(-n/2)] dt for b = sqrt(1 - rho^2)."""
    rho = np.asarray(rho, dtype=float)
    b = np.sqrt(1.0 - rho * rho)
    one_minus_b = rho * rho / (1.0 + b)
    w, wt = _jacobi_01(s, m)
    t = b[:, None] + one_minus_b[:, None] * w[None, :]
    g = (2 * b[:, None] + one_minus_b[:, None] * w[None, :]) ** (-s)
    if exact:
        g = g * (rho[:, None] ** 2 + t * t) ** (-n / 2)
    return one_minus_b ** (1 - s) * (g @ wt)


def knapp_mass(p: FracParam, g: KnappGeometry, cfg: QuadConfig = DEFAULT_QUAD,
               exact: bool = False) -> float:
    """G(eps) = int_(1-eps)^1 int_(sqrt(1-t^2))^R rho^(n-2) (rho^2 - (1-t^2))^-s d rho dt.

    The order is swapped: for rho in (0, R) the t-range is (sqrt(1-rho^2), 1),
    whose (t - b)^-s endpoint singularity is integrated by Gauss-Jacobi.
    With ``exact`` the full A_1 mass of the cylinder outside the unit ball is
    returned (factor c(n,s) sigma_(n-2) (rho^2 + t^2)^(-n/2) included).
    """
    if g.n != p.n:
        raise DomainError("geometry and parameter dimensions differ")
    n, s = p.n, p.s

    def outer(rho):
        return rho ** (n - 2) * _inner_singular(rho, s, n, exact)

    val = integrate_finite(outer, 0.0, g.R, NO_SINGULARITY, cfg)
    if exact:
        val *= kernel_constant(p) * (2.0 if n == 2 else sphere_area(n - 1))
    return float(val)


def _inner_regular(rho, s, n, eps, cfg):
    """int_(1-eps)^1 (t^2 - b^2)^-s (rho^2 + t^2)^(-n/2) dt when b < 1 - eps."""
    out = np.empty(len(rho))
    for i, r in enumerate(rho):
        b2 = 1.0 - r * r
        f = lambda t: (t * t - b2) ** (-s) * (r * r + t * t) ** (-n / 2)
        out[i] = integrate_finite(f, 1.0 - eps, 1.0, NO_SINGULARITY, cfg)
    return out


def knapp_inclusion_masses(p: FracParam, g: KnappGeometry, cfg: QuadConfig = DEFAULT_QUAD):
    """A_1 masses of C_eps, K_eps and C*_eps outside the unit ball (n = 2 or 3)."""
    n, s = p.n, p.s
    if n not in (2, 3):
        raise DomainError("inclusion masses are implemented for n = 2, 3")
    R = g.R
    const = kernel_constant(p) * (2.0 if n == 2 else sphere_area(n - 1))
    cyl = knapp_mass(p, g, cfg, exact=True)
    if n == 2:
        # the square and both cylinders coincide with the interval [-R, R]
        return cyl, cyl, cyl
    Rs = math.sqrt(n - 1) * R

    def ring(rho):
        return rho * _inner_regular(rho, s, n, g.eps, cfg)

    extra = integrate_finite(ring, R, Rs, NO_SINGULARITY, cfg)

    def ring_box(rho):
        frac = 1.0 - 4.0 * np.arccos(np.minimum(1.0, R / rho)) / math.pi
        return frac * ring(rho)

    extra_box = integrate_finite(ring_box, R, Rs, NO_SINGULARITY, cfg)
    return cyl, cyl + const * extra_box, cyl + const * extra


# ---------------------------------------------------------------------------
# Knapp norm


def _sinc_moment(p: float, j: int, cfg: QuadConfig) -> float:
    f = lambda v: np.sin(v) ** p * v**j
    return integrate_finite(f, 0.0, math.pi, NO_SINGULARITY, cfg, n_init=4)


@lru_cache(maxsize=64)
def abs_sinc_power(p: float, k_direct: int = 16, terms: int = 40) -> float:
    """int_0^inf |sin u / u|^p du for p > 1.

    Blocks [k pi, (k+1) pi] for k < k_direct are integrated directly; the rest
    are summed in closed form by expanding (k pi + v)^-p binomially in v/(k pi),
    which gives Hurwitz zeta sums.
    """
    if not p > 1:
        raise DomainError("the integral diverges for p <= 1")
    cfg = QuadConfig(abs_tol=1e-14, rel_tol=1e-13)
    f = lambda u: np.abs(np.sinc(u / math.pi)) ** p
    head = integrate_finite(f, 0.0, k_direct * math.pi, NO_SINGULARITY, cfg, n_init=4 * k_direct)
    tail = 0.0
    coef = 1.0
    for j in range(terms):
        if j > 0:
            coef *= (-p - j + 1) / j
        tail += coef * math.pi ** (-p - j) * _sinc_moment(p, j, cfg) * zeta(p + j, k_direct)
    return head + tail


def sinc_factor_integral(c: float, p: float) -> float:
    """int_R |sin(c x) / (pi x)|^p dx = 2 c^(p-1) pi^-p int_0^inf |sin u/u|^p du."""
    return 2.0 * c ** (p - 1) * math.pi ** (-p) * abs_sinc_power(p)


def knapp_norm_factors(g: KnappGeometry, p: float):
    """The 1-D factors whose product is ||f_eps||_p^p."""
    if not p > 1:
        raise DomainError("f_eps is not in L^1; need p > 1")
    return [sinc_factor_integral(math.pi * g.eps, p)] + \
        [sinc_factor_integral(2 * math.pi * g.R, p)] * (g.n - 1)


def knapp_norm(g: KnappGeometry, p: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """||f_eps||_p for the inverse transform of the indicator of K_eps."""
    return float(np.prod(knapp_norm_factors(g, p)) ** (1.0 / p))


# ---------------------------------------------------------------------------
# necessity scan


def threshold_q(p_frac: FracParam, p: float) -> float:
    """((n+1-2s)/(n+1)) p'."""
    pc = p / (p - 1)
    return (p_frac.n + 1 - 2 * p_frac.s) / (p_frac.n + 1) * pc


def theoretical_exponent(p_frac: FracParam, ep: ExponentPair) -> float:
    n, s = p_frac.n, p_frac.s
    return ((n + 1) / 2 - s) / ep.q - (n + 1) / (2 * ep.p_conj)


def fit_exponent(eps, vals, n_small: int = 6) -> float:
    """Least-squares slope of log vals against log eps on the n_small smallest eps."""
    eps = np.asarray(eps, float)
    vals = np.asarray(vals, float)
    idx = np.argsort(eps)[:n_small]
    return fit_loglog(eps[idx], vals[idx], max_resid=0.05)[0]


@dataclass
class NecessityScan:
    fitted: float
    theoretical: float
    verdict: str
    rows: list = field(default_factory=list)

    def __float__(self):
        return self.fitted


CSV_COLUMNS = ("n", "s", "p", "q", "eps", "mass", "norm", "quotient", "fitted_exponent",
               "theoretical_exponent", "verdict")


def classify(exponent: float, band: float = 0.05) -> str:
    if exponent > band:
        return "admissible"
    if exponent < -band:
        return "violated"
    return "threshold"


def necessity_scan(p_frac: FracParam, ep: ExponentPair, eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
                   cfg: QuadConfig = DEFAULT_QUAD, band: float = 0.05) -> NecessityScan:
    """Fit the eps-exponent of G(eps)^(1/q) / ||f_eps||_p.

    A positive exponent means the quotient vanishes as eps -> 0 (no
    obstruction), a negative one that it blows up (the inequality fails).
    """
    n, s = p_frac.n, p_frac.s
    if not ep.p < 2 * n / (n + 2 * s - 1):
        raise DomainError(f"p = {ep.p:g} outside the admissible range p < 2n/(n+2s-1)")
    if ep.p == 1:
        raise DomainError("p = 1 gives an unbounded Knapp norm")
    masses, norms = [], []
    for e in eps_grid:
        g = KnappGeometry(n, e)
        masses.append(knapp_mass(p_frac, g, cfg))
        norms.append(knapp_norm(g, ep.p, cfg))
    quot = np.array(masses) ** (1 / ep.q) / np.array(norms)
    fitted = fit_exponent(eps_grid, quot)
    theo = theoretical_exponent(p_frac, ep)
    verdict = classify(fitted, band)
    rows = [dict(n=n, s=s, p=ep.p, q=ep.q, eps=e, mass=m, norm=nm, quotient=qv,
                 fitted_exponent=fitted, theoretical_exponent=theo, verdict=verdict)
            for e, m, nm, qv in zip(eps_grid, masses, norms, quot)]
    return NecessityScan(fitted, theo, verdict, rows)


# ---------------------------------------------------------------------------
# restriction quotient and the Plancherel identity


def lp_norm(f: RadialProfile, n: int, p: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """(sigma_(n-1) int_0^inf |f(r)|^p r^(n-1) dr)^(1/p) for a radial Schwartz or compact f."""
    from .oscquad import _schwartz_cutoff

    if f.decay == "compact":
        end = f.outer_radius
    elif f.decay == "schwartz":
        end = _schwartz_cutoff(f, n, cfg.abs_tol, 1.0)
    else:
        raise DomainError("lp_norm needs a Schwartz or compactly supported profile")
    h = lambda r: np.abs(np.asarray(f(r), dtype=float)) ** p * r ** (n - 1)
    val = integrate_finite(h, 0.0, end, NO_SINGULARITY, cfg, n_init=8)
    return float((sphere_area(n) * val) ** (1.0 / p))


def _ft_values(f: RadialProfile, n: int, rho, cfg: QuadConfig):
    rho = np.asarray(rho, dtype=float)
    return np.array([np.real(bochner_radial_ft(f, n, float(x), cfg)) for x in rho.ravel()]).reshape(rho.shape)


def weighted_ft_integral(p_frac: FracParam, f: RadialProfile, q: float, cfg: QuadConfig = DEFAULT_QUAD,
                         ft=None) -> float:
    """int |hat f(xi)|^q A_1^(s)(xi) d xi for radial f, by radial quadrature.

    hat f comes from ``bochner_radial_ft`` unless a vectorized ``ft`` is given.
    The (rho - 1)^-s singularity is factored out exactly; the rho range is
    extended by doubling until a dyadic shell contributes below tolerance.
    """
    n, s = p_frac.n, p_frac.s
    c = kernel_constant(FracParam(s, n))
    fhat = ft if ft is not None else (lambda r: _ft_values(f, n, r, cfg))

    def reg(rho, d):
        # A_1(rho) rho^(n-1) = c (rho - 1)^-s (rho + 1)^-s rho^-1
        return c * (2.0 + d) ** (-s) / rho * np.abs(fhat(rho)) ** q

    total = integrate_finite(reg, 1.0, 2.0, SingularitySpec("left", -s), cfg, factored=True)

    def h(rho):
        return eval_kernel(FracParam(s, n), rho) * rho ** (n - 1) * np.abs(fhat(rho)) ** q

    a = 2.0
    for _ in range(40):
        piece = integrate_finite(h, a, 2 * a, NO_SINGULARITY, cfg, n_init=4)
        total += piece
        a *= 2
        if abs(piece) < 1e-3 * cfg.abs_tol * max(1.0, abs(total)) and a > 8:
            break
    return float(sphere_area(n) * total)


def restriction_quotient(p_frac: FracParam, ep: ExponentPair, f: RadialProfile,
                         cfg: QuadConfig = DEFAULT_QUAD, ft=None) -> float:
    """(int |hat f|^q A_1^(s))^(1/q) / ||f||_p for radial f."""
    if f.decay not in ("schwartz", "compact"):
        raise DomainError("restriction_quotient expects a Schwartz-class or compact profile")
    norm = lp_norm(f, p_frac.n, ep.p, cfg)
    if norm == 0.0:
        return 0.0
    lhs = weighted_ft_integral(p_frac, f, ep.q, cfg, ft) ** (1.0 / ep.q)
    return lhs / norm


def _spherical_mean_grid(f, r, u, n, n_nodes=256):
    """M_u(f, x) with |x| = r, for grids r (R,) and u (U,).

    Gauss-Jacobi in cos(theta) with weight (1 - x^2)^((n-3)/2), which is
    exact for the angular measure of the sphere.
    """
    a = (n - 3) / 2
    x, w = roots_jacobi(n_nodes, a, a)
    w = w / w.sum()
    out = np.empty((len(r), len(u)))
    for i, ri in enumerate(r):
        d2 = ri * ri + u[:, None] ** 2 - 2 * ri * u[:, None] * x[None, :]
        out[i] = np.asarray(f(np.sqrt(np.maximum(d2, 0.0))), dtype=float) @ w
    return out


def _gl_panels(edges, m):
    x, w = np.polynomial.legendre.leggauss(m)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def plancherel_rhs(p_frac: FracParam, f: RadialProfile, cfg: QuadConfig = DEFAULT_QUAD,
                   m: int = 24, n_nodes: int = 256) -> float:
    """int f(x) (hat A_1 * f)(x) dx for radial Schwartz f by a (radius x radius x angle) rule.

    (hat A_1 * f)(x) = sigma_(n-1) int_0^inf hat A_1(u) u^(n-1) M_u(f, x) du,
    with hat A_1 from the closed form at fixed Gauss-Legendre nodes.
    """
    from .oscquad import _schwartz_cutoff

    n = p_frac.n
    if f.decay != "schwartz" and f.decay != "compact":
        raise DomainError("plancherel_rhs expects a Schwartz or compact profile")
    Rf = f.outer_radius if f.decay == "compact" else _schwartz_cutoff(f, n, cfg.abs_tol, 1.0)
    # graded panels near 0, where hat A_1 - 1 behaves like u^(2s)
    r_edges = np.unique(np.concatenate([[0.0], Rf * np.geomspace(1e-3, 1.0, 8), np.linspace(0, Rf, 9)[1:]]))
    u_edges = np.unique(np.concatenate([[0.0], 2 * Rf * np.geomspace(1e-4, 1.0, 12),
                                        np.linspace(0, 2 * Rf, 33)[1:]]))
    r, wr = _gl_panels(r_edges, m)
    u, wu = _gl_panels(u_edges, m)
    ahat = ft_riesz(FracParam(p_frac.s, n), u, FtForm.PRIMARY_INTEGRAL, cfg)
    M = _spherical_mean_grid(f, r, u, n, n_nodes)
    sig = sphere_area(n)
    conv = sig * (M @ (ahat * u ** (n - 1) * wu))
    fr = np.asarray(f(r), dtype=float)
    return float(sig * np.sum(wr * fr * r ** (n - 1) * conv))


def tomas_stein_identity(p_frac: FracParam, f: RadialProfile, cfg: QuadConfig = DEFAULT_QUAD,
                         tol: float = 1e-4, ft=None) -> VerificationRecord:
    """Compare int |hat f|^2 A_1 with int f (hat A_1 * f) (relative tolerance)."""
    if p_frac.n not in (2, 3):
        raise DomainError("the convolution side is implemented for n = 2, 3")
    lhs = weighted_ft_integral(p_frac, f, 2.0, cfg, ft)
    rhs = plancherel_rhs(p_frac, f, cfg)
    return VerificationRecord.compare("tomas_stein_identity", "plancherel-pairing", lhs, rhs, tol,
                                      "rel", note=f"n={p_frac.n} s={p_frac.s:g} f={f.label}")
