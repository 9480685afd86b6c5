"""Endpoint bounds and the complex-interpolation constant M_s."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .errors import DomainError, NoConvergence
from .fouriertransforms import k0_kernel, k0_tail_bound
from .oscquad import DEFAULT_QUAD, NO_SINGULARITY, QuadConfig, integrate_finite
from .params import FracParam, RadialProfile, sphere_area
from .records import VerificationRecord
from .specfun import rgamma

M0_Y_MAX = 8.0
DEFAULT_XI_GRID = tuple(np.concatenate([[1e-6, 1e-3, 1e-2], np.arange(1, 641) / 16.0]))
DEFAULT_Y_GRID = tuple(np.arange(0, 33) * 0.25)


def theta(p: FracParam) -> float:
    """1 - 2s/(n+1)."""
    return 1.0 - 2.0 * p.s / (p.n + 1)


def m1_bound(y: float, n: int) -> float:
    """Sharp L^inf bound 2 sinh(pi|y|)/(sigma_(n-1) pi) for the multiplier of order iy."""
    return 2.0 * math.sinh(math.pi * abs(y)) / (sphere_area(n) * math.pi)


def m1_gamma_route(y: float, n: int) -> float:
    """The same bound as 2 / (sigma_(n-1) |Gamma(iy) Gamma(1-iy)|), via reciprocal gamma."""
    if y == 0:
        return 0.0
    r = complex(rgamma(1j * y)) * complex(rgamma(1 - 1j * y))
    return 2.0 * abs(r) / sphere_area(n)


def m0_bound(y: float, n: int, xi_grid: Sequence[float] = DEFAULT_XI_GRID,
             cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """sup_xi |K_(-(n-1)/2+iy)(xi)|: grid maximum, or the tail bound beyond the grid if larger."""
    if abs(y) > M0_Y_MAX:
        raise DomainError(f"|y| = {abs(y):g} beyond the verified range {M0_Y_MAX:g}")
    xi = np.asarray(xi_grid, dtype=float)
    grid_sup = float(np.max(np.abs(k0_kernel(y, n, xi, cfg))))
    return max(grid_sup, k0_tail_bound(y, n, float(xi.max())))


def fit_growth(ys, vals, y_min: float = 0.0):
    """(log-intercept, rate) of log vals = a + b |y| for |y| >= y_min."""
    ys = np.abs(np.asarray(ys, float))
    lv = np.log(np.asarray(vals, float))
    keep = ys >= y_min
    b, a = np.polyfit(ys[keep], lv[keep], 1)
    return float(a), float(b)


@dataclass
class EndpointBound:
    """A positive bound y -> M(y), sampled (empirical) or exact (analytic)."""

    kind: str
    values: Dict[float, float]
    growth_fit: tuple
    exact: Optional[Callable[[float], float]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("analytic_M1", "empirical_M0"):
            raise DomainError(f"unknown endpoint kind {self.kind!r}")
        if any(v < 0 for v in self.values.values()):
            raise DomainError("endpoint bounds must be non-negative")

    def log_bound(self, y):
        """log M(|y|): exact, or linear interpolation of log samples, then the growth line."""
        y = np.abs(np.asarray(y, float))
        if self.exact is not None:
            with np.errstate(divide="ignore"):
                return np.log(np.vectorize(self.exact)(y))
        ys = np.array(sorted(self.values))
        lv = np.log([self.values[k] for k in ys])
        a, b = self.growth_fit
        inside = np.interp(y, ys, lv)
        # beyond the samples, continue from the last sample at the fitted rate
        return np.where(y <= ys[-1], inside, lv[-1] + b * (y - ys[-1]))

    def growth_cap(self):
        """(a, b) with log M(y) <= a + b y for all sampled y (used for truncation)."""
        ys = np.array(sorted(self.values))
        lv = np.log(np.maximum([self.values[k] for k in ys], 1e-300))
        b = max(self.growth_fit[1], 0.0)
        return float(np.max(lv - b * ys)), b


def m1_endpoint(n: int, ys: Sequence[float] = tuple(np.linspace(1, 6, 21))) -> EndpointBound:
    vals = {float(y): m1_bound(y, n) for y in ys}
    return EndpointBound("analytic_M1", vals, fit_growth(list(vals), list(vals.values())),
                         exact=lambda y: m1_bound(y, n))


@lru_cache(maxsize=16)
def _m0_samples(n: int, ys: tuple, cfg: QuadConfig):
    return tuple(m0_bound(y, n, DEFAULT_XI_GRID, cfg) for y in ys)


def m0_endpoint(n: int, ys: Sequence[float] = DEFAULT_Y_GRID, cfg: QuadConfig = DEFAULT_QUAD,
                fit_range=(0.0, 4.0)) -> EndpointBound:
    ys = tuple(float(y) for y in ys)
    vals = dict(zip(ys, _m0_samples(n, ys, cfg)))
    sel = [y for y in ys if fit_range[0] <= y <= fit_range[1]]
    return EndpointBound("empirical_M0", vals, fit_growth(sel, [vals[y] for y in sel]))


def _weights(p_s: float, n: int):
    w = 2 * math.pi * p_s / (n + 1)
    return math.sin(w), math.cos(w)


def stein_constant(p, m0: EndpointBound, m1: EndpointBound, cfg: QuadConfig = DEFAULT_QUAD,
                   rescale_imaginary: bool = False, n: Optional[int] = None,
                   return_error: bool = False):
    """M_s = exp[sin w int_0^inf {log M0/(cosh pi y + cos w) + log M1/(cosh pi y - cos w)} dy].

    w = 2 pi s/(n+1).  ``p`` is a FracParam, or s itself (then pass n); s = 1
    gives the limiting constant.  With ``rescale_imaginary`` the endpoint
    bounds are read at (n+1) y / 2, the imaginary parts that an analytic
    reparametrization of the strip would produce.

    The log y singularity of log M1 at 0 is handled by a geometric mesh down
    to 1e-14 and the analytic contribution of [0, 1e-14]; the y range is cut
    at Y* where (a + b Y*) 2 e^(-pi Y*) sits below abs_tol/10.
    """
    if isinstance(p, FracParam):
        s, n = p.s, p.n
    else:
        s = float(p)
        if n is None or not 0 < s <= 1:
            raise DomainError("pass s in (0, 1] together with n")
    sw, cw = _weights(s, n)
    scale = (n + 1) / 2 if rescale_imaginary else 1.0

    def integrand(y):
        ch = np.cosh(math.pi * y)
        return (m0.log_bound(scale * y) / (ch + cw) + m1.log_bound(scale * y) / (ch - cw))

    a0, b0 = m0.growth_cap()
    a1, b1 = m1.growth_cap()
    a, b = abs(a0) + abs(a1), (b0 + b1) * scale
    cap = lambda Y: (a + b * Y) * 2 * math.exp(-math.pi * Y) * 2 / (1 - abs(cw))
    Y = 1.0
    while cap(Y) / math.pi > cfg.abs_tol / 10:
        Y += 0.5
        if Y > 200:
            raise NoConvergence("truncation point not found", Y, cap(Y))
    delta = 1e-14
    # near 0: log M1 ~ log(2 scale y / sigma), log M0 ~ log M0(0)
    l0 = float(m0.log_bound(0.0))
    head = delta * (l0 / (1 + cw) + (math.log(2 * scale * delta / sphere_area(n)) - 1) / (1 - cw))
    edges = [delta * 10.0**k for k in range(15)] + [y for y in np.arange(1.0, Y, 1.0)][1:] + [Y]
    total, err = head, cap(Y) / math.pi
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = integrate_finite(integrand, lo, hi, NO_SINGULARITY, cfg, return_error=True)
        total += v
        err += e
    val = math.exp(sw * total)
    return (val, val * sw * err) if return_error else val


def gamma_bound_checks(n: int, ys: Sequence[float] = tuple(np.linspace(-10, 10, 81))):
    """Pointwise reciprocal-gamma envelopes on the line used for M0.

    Returns (max of |1/Gamma(n+1-iy)| / (1.5 e^(pi|y|/2)), fitted C for
    |1/Gamma((n+1)/2-iy)| <= C e^(pi|y|/2)).
    """
    ys = np.asarray(ys, float)
    r1 = np.abs(rgamma(n + 1 - 1j * ys)) / (1.5 * np.exp(math.pi * np.abs(ys) / 2))
    r2 = np.abs(rgamma((n + 1) / 2 - 1j * ys)) / np.exp(math.pi * np.abs(ys) / 2)
    return float(np.max(r1)), float(np.max(r2))


@lru_cache(maxsize=16)
def endpoint_pair(n: int, cfg: QuadConfig = DEFAULT_QUAD):
    return m0_endpoint(n, cfg=cfg), m1_endpoint(n)


def tomas_stein_budget(p: FracParam, cfg: QuadConfig = DEFAULT_QUAD,
                       lambdas: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0),
                       rescale_imaginary: bool = False) -> VerificationRecord:
    """Gaussian dilates: restriction quotient at q = 2 against sqrt(M_s).

    The constant is the one built here from the sampled M0 and the sharp M1;
    a failure would point at those bounds, not at the inequality itself.
    """
    from .restriction_lab import ExponentPair, restriction_quotient

    m0, m1 = endpoint_pair(p.n, cfg)
    ms = stein_constant(p, m0, m1, cfg, rescale_imaginary)
    ep = ExponentPair(p.endpoint_p, 2.0)
    g = RadialProfile.gaussian()
    quots = [restriction_quotient(p, ep, g.dilate(lam), cfg) for lam in lambdas]
    budget = math.sqrt(ms)
    margins = [budget - q for q in quots]
    return VerificationRecord.predicate(
        "tomas_stein_budget", "restriction-budget", min(margins) > 0, max(quots), budget,
        note=f"n={p.n} s={p.s:g}; constants are this artifact's, not sharp",
        extra={"quotients": quots, "margins": margins, "M_s": ms})


def stein_block(p: FracParam, cfg: QuadConfig = DEFAULT_QUAD, rescale_imaginary: bool = False) -> dict:
    """JSON block {n, s, theta, M0_fit, M1_rate, M_s, M_limit_estimate, margins}."""
    m0, m1 = endpoint_pair(p.n, cfg)
    ms = stein_constant(p, m0, m1, cfg, rescale_imaginary)
    lim = stein_constant(1.0, m0, m1, cfg, rescale_imaginary, n=p.n)
    rec = tomas_stein_budget(p, cfg, rescale_imaginary=rescale_imaginary)
    return {"n": p.n, "s": p.s, "theta": theta(p),
            "M0_fit": {"log_intercept": m0.growth_fit[0], "rate": m0.growth_fit[1]},
            "M1_rate": m1.growth_fit[1], "M_s": ms, "M_limit_estimate": lim,
            "margins": rec.extra["margins"]}
