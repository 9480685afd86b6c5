"""Quadrature engine.

Adaptive Gauss-Kronrod integration on finite intervals with algebraic
endpoint singularities, accelerated block summation for semi-infinite
Bessel-weighted integrals, and the radial (Bochner) Fourier transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NoConvergence
from .params import RadialProfile, sphere_area
from .specfun import as_complex, jv

# Gauss-Kronrod 7/15 abscissae (non-negative half) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
# full 15-point layout: -x0..-x6, 0, x6..x0
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_WK15 = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_G_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_WG7 = np.array([_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]])

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdiv: int = 2000
    tail_zero_blocks: int = 24
    accel_order: int = 6

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("tolerances must be positive")
        if self.max_subdiv < 8:
            raise DomainError("max_subdiv must be at least 8")
        if self.tail_zero_blocks < 8:
            raise DomainError("tail_zero_blocks must be at least 8")
        if self.accel_order < 2:
            raise DomainError("accel_order must be at least 2")

    def tightened(self, factor: float = 0.5) -> "QuadConfig":
        return QuadConfig(self.abs_tol * factor, self.rel_tol * factor, self.max_subdiv * 2,
                          self.tail_zero_blocks, self.accel_order)


DEFAULT_QUAD = QuadConfig()


@dataclass(frozen=True)
class SingularitySpec:
    """Declared |t - endpoint|^exponent behaviour at one end of the interval."""

    location: str = "none"
    exponent: float = 0.0

    def __post_init__(self):
        if self.location not in ("left", "right", "none"):
            raise DomainError(f"unknown singularity location {self.location!r}")
        if not (-1.0 < self.exponent <= 0.0):
            raise DomainError(f"singularity exponent {self.exponent} outside (-1, 0]")


NO_SINGULARITY = SingularitySpec()


@dataclass(frozen=True)
class OscIntegralSpec:
    """The integral of t^mu J_nu(t) over (lower, inf)."""

    mu: complex
    nu: complex
    lower: float = 0.0

    def __post_init__(self):
        mu = as_complex(self.mu, "mu")
        nu = as_complex(self.nu, "nu")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)
        if not self.lower >= 0 or not math.isfinite(self.lower):
            raise DomainError("lower limit must be finite and non-negative")
        if not mu.real < 0.5:
            raise DomainError("Re mu must be below 1/2 for convergence at infinity")
        if self.lower == 0 and not (mu + nu).real > -1.0:
            raise DomainError("Re(mu + nu) must exceed -1 when the lower limit is 0")


# ---------------------------------------------------------------------------
# finite intervals


def _vectorize(f):
    def g(t):
        out = f(t)
        if np.shape(out) != np.shape(t):
            out = np.array([f(v) for v in t.ravel()]).reshape(t.shape)
        return np.asarray(out)
    return g


def integrate_finite(f: Callable, a: float, b: float, sing: SingularitySpec = NO_SINGULARITY,
                     cfg: QuadConfig = DEFAULT_QUAD, *, n_init: int = 1,
                     return_error: bool = False, pass_offset: bool = False,
                     factored: bool = False):
    """Integrate f over [a, b] by globally adaptive G7/K15.

    ``f`` should accept a numpy array.  A declared endpoint singularity of
    exponent e is removed by t - a = (b - a) u^m with m = 2/(1 + e), which
    leaves an integrand vanishing linearly in u.  With ``pass_offset`` the
    integrand is called as f(t, d) where d is the exact distance from t to
    the singular endpoint (to a for location ``none``); this avoids the
    cancellation in expressions such as t^2 - a^2.  With ``factored`` the
    callback f(t, d) returns only the regular part phi and the integrand is
    phi(t) d^e; the substitution m = 1/(1 + e) then absorbs d^e exactly, which
    stays accurate for e close to -1.  Raises NoConvergence when
    ``cfg.max_subdiv`` bisections do not reach max(abs_tol, rel_tol |I|).
    """
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainError(f"need finite a < b, got [{a}, {b}]")
    if factored and sing.location == "none":
        raise DomainError("factored integration needs a singular endpoint")
    if pass_offset or factored:
        F = f
    else:
        F0 = _vectorize(f)
        F = lambda t, d: F0(t)
    L = b - a
    if sing.location == "none":
        def G(u):
            d = L * u
            return F(a + d, d) * L
    elif factored:
        e = sing.exponent
        m = 1.0 / (1.0 + e)
        sign = 1.0 if sing.location == "left" else -1.0
        base = a if sing.location == "left" else b
        const = L ** (1.0 + e) * m

        def G(u):
            d = L * u**m
            return np.asarray(F(base + sign * d, d), dtype=complex) * const
    else:
        m = 2.0 / (1.0 + sing.exponent)
        sign = 1.0 if sing.location == "left" else -1.0
        base = a if sing.location == "left" else b

        def G(u):
            um = u**m
            t = base + sign * L * um
            ok = (um > 0) if pass_offset else ((t > a) & (t < b))
            out = np.zeros(u.shape, dtype=complex)
            if np.any(ok):
                out[ok] = F(t[ok], L * um[ok]) * (L * m * um[ok] / u[ok])
            return out

    lo = np.linspace(0.0, 1.0, n_init + 1)[:-1]
    hi = np.linspace(0.0, 1.0, n_init + 1)[1:]
    hi[-1] = 1.0
    res, err, rabs = _gk_batch(G, lo, hi)
    n_split = 0
    while True:
        total = res.sum()
        target = max(cfg.abs_tol, cfg.rel_tol * abs(total), 50 * _EPS * rabs.sum())
        etot = err.sum()
        if etot <= target:
            break
        order = np.argsort(-err, kind="stable")
        remaining = etot - np.cumsum(err[order])
        k = int(np.searchsorted(-remaining, -0.5 * target)) + 1
        pick = order[:max(1, min(k, len(order)))]
        n_split += len(pick)
        if n_split > cfg.max_subdiv:
            raise NoConvergence(
                f"integrate_finite on [{a:g}, {b:g}]: error {etot:.3g} above {target:.3g}",
                value=_real_if(total), error=float(etot))
        keep = np.ones(len(lo), dtype=bool)
        keep[pick] = False
        mid = 0.5 * (lo[pick] + hi[pick])
        nlo = np.concatenate([lo[pick], mid])
        nhi = np.concatenate([mid, hi[pick]])
        r2, e2, a2 = _gk_batch(G, nlo, nhi)
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        res = np.concatenate([res[keep], r2])
        err = np.concatenate([err[keep], e2])
        rabs = np.concatenate([rabs[keep], a2])
    # fixed summation order for determinism
    order = np.argsort(lo, kind="stable")
    value = _real_if(math.fsum(res[order].real) + 1j * math.fsum(res[order].imag))
    if return_error:
        return value, float(err.sum())
    return value


def _real_if(v):
    v = complex(v)
    return v.real if v.imag == 0.0 else v


def _gk_batch(G, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(G(nodes.ravel()), dtype=complex).reshape(nodes.shape)
    if not np.all(np.isfinite(vals)):
        raise DomainError("integrand is not finite at a quadrature node "
                          "(undeclared singularity?)")
    k15 = half * (vals @ _WK15)
    g7 = half * (vals[:, _G_IDX] @ _WG7)
    mean = k15 / (2 * half)
    resasc = half * (np.abs(vals - mean[:, None]) @ _WK15)
    resabs = half * (np.abs(vals) @ _WK15)
    raw = np.abs(k15 - g7)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * raw / resasc) ** 1.5), raw)
    err = np.maximum(scaled, 50 * _EPS * resabs)
    return k15, err, resabs


# ---------------------------------------------------------------------------
# oscillatory tails


def mcmahon_zero(nu: float, k):
    """McMahon estimate of the k-th positive zero of J_nu."""
    beta = (np.asarray(k, dtype=float) + 0.5 * nu - 0.25) * math.pi
    return beta - (4 * nu * nu - 1) / (8 * beta)


def _first_block_index(nu: float, x: float) -> int:
    k = max(1, int(math.ceil(x / math.pi - 0.5 * nu + 0.25)))
    while mcmahon_zero(nu, k) < x:
        k += 1
    return k


def asymptotic_start(nu: complex) -> float:
    """Argument beyond which block summation of J_nu integrals is used."""
    nu = complex(nu)
    return max(12.0, 2.0 * abs(nu) + 8.0)


def oscillatory_tail(g: Callable, nu, scale: float, start: float,
                     cfg: QuadConfig = DEFAULT_QUAD):
    """Integral of g(t) J_nu(scale t) over (X0, inf) by accelerated block sums.

    X0 is the first McMahon zero of J_{Re nu}(scale t) with scale t beyond
    both ``scale*start`` and the asymptotic regime.  Blocks run between
    consecutive zero estimates; their partial sums are averaged repeatedly
    (Euler-type acceleration of an alternating series).  ``g`` must be a
    smooth, slowly varying amplitude on [X0, inf).  Returns (X0, value, err).
    """
    nu = complex(nu)
    nr = nu.real
    x_from = max(scale * start, asymptotic_start(nu))
    k0 = _first_block_index(nr, x_from)
    nblocks = cfg.tail_zero_blocks
    prev = None
    for _ in range(4):
        edges = mcmahon_zero(nr, np.arange(k0, k0 + nblocks + 1)) / scale
        val, err = _accelerated_blocks(g, nu, scale, edges, cfg.accel_order)
        if prev is not None:
            err = max(err, abs(val - prev))
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(val))
        if err <= tol:
            return float(edges[0]), val, err
        prev = val
        nblocks *= 2
    raise NoConvergence(f"block acceleration did not settle (err {err:.3g})", value=val, error=err)


def _accelerated_blocks(g, nu, scale, edges, order):
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    t = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = np.asarray(g(t), dtype=complex) * jv(nu, scale * t)
    blocks = half * (vals @ _GL_W)
    sums = np.cumsum(blocks)
    levels = [sums]
    # keep averaging as long as it helps; at least `order` times
    while len(levels[-1]) > 2:
        s = levels[-1]
        levels.append(0.5 * (s[1:] + s[:-1]))
        if len(levels) > order and len(levels[-1]) <= len(sums) // 2:
            break
    last = levels[-1]
    val = complex(last[-1])
    err = max(abs(last[-1] - last[-2]), abs(last[-1] - levels[-2][-1]))
    return val, float(err)


def _power(mu):
    mu = complex(mu)
    if mu.imag == 0:
        m = mu.real
        return lambda t: np.asarray(t, dtype=float) ** m
    return lambda t: np.asarray(t, dtype=float) ** mu


def bessel_tail(spec: OscIntegralSpec, cfg: QuadConfig = DEFAULT_QUAD):
    """Integral of t^mu J_nu(t) over (lower, inf).

    The head up to the first block edge is handled by ``integrate_finite``
    (with the t^(mu+nu) endpoint singularity declared when lower = 0) and
    the remainder by accelerated alternating block sums.  Real output for
    real parameters.
    """
    mu, nu = spec.mu, spec.nu
    pw = _power(mu)
    x0, tail, _ = oscillatory_tail(pw, nu, 1.0, spec.lower, cfg)
    head = 0.0
    if spec.lower < x0:
        head = _bessel_head(mu, nu, spec.lower, x0, cfg)
    out = complex(head) + tail
    if mu.imag == 0 and nu.imag == 0:
        return out.real
    return out


def _bessel_head(mu, nu, a, b, cfg):
    pw = _power(mu)

    def f(t):
        return pw(t) * jv(nu, t)

    npieces = max(1, int(math.ceil((b - a) / 4.0)))
    if a == 0.0:
        e = (mu + nu).real
        first = min(b, 1.0)
        sing = SingularitySpec("left", min(0.0, e)) if e < 0 else NO_SINGULARITY
        v = integrate_finite(f, 0.0, first, sing, cfg)
        if first < b:
            v += integrate_finite(f, first, b, NO_SINGULARITY, cfg, n_init=npieces)
        return v
    return integrate_finite(f, a, b, NO_SINGULARITY, cfg, n_init=npieces)


def bessel_tail_many(mu, nu, lowers, cfg: QuadConfig = DEFAULT_QUAD) -> np.ndarray:
    """bessel_tail at many lower limits, sharing one tail evaluation.

    The integrals between consecutive sorted lower limits are accumulated
    backwards from the largest one.
    """
    mu = as_complex(mu, "mu")
    nu = as_complex(nu, "nu")
    lw = np.asarray(lowers, dtype=float)
    flat = lw.ravel()
    if flat.size == 0:
        return lw.astype(complex)
    OscIntegralSpec(mu, nu, float(flat.min()))  # validation
    uniq = np.unique(flat)
    pw = _power(mu)

    def f(t):
        return pw(t) * jv(nu, t)

    x0, tail, _ = oscillatory_tail(pw, nu, 1.0, float(uniq[-1]), cfg)
    pts = np.unique(np.concatenate([uniq, [x0]]))
    pieces = np.zeros(len(pts) - 1, dtype=complex)
    start = 0
    if pts[0] == 0.0:
        pieces[0] = _bessel_head(mu, nu, 0.0, float(pts[1]), cfg)
        start = 1
    if len(pts) - 1 > start:
        pieces[start:] = _piecewise_integrals(f, pts[start:], cfg)
    cum = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]]) + tail
    idx = np.searchsorted(pts, flat)
    out = cum[idx].reshape(lw.shape)
    if mu.imag == 0 and nu.imag == 0:
        return out.real
    return out


def _piecewise_integrals(f, pts, cfg: QuadConfig) -> np.ndarray:
    """Integrals of f over [pts[i], pts[i+1]] (pts[0] > 0), batched.

    Each piece is cut into chunks no longer than 1 and, near the origin,
    graded geometrically; all chunks go through one K15 evaluation and only
    chunks with a large error estimate are refined adaptively.
    """
    lo_list, hi_list, owner = [], [], []
    for i in range(len(pts) - 1):
        a, b = float(pts[i]), float(pts[i + 1])
        edges = [a]
        x = a
        while x < b:
            x = min(b, x + min(1.0, 0.5 * x))
            edges.append(x)
        lo_list.extend(edges[:-1])
        hi_list.extend(edges[1:])
        owner.extend([i] * (len(edges) - 1))
    lo = np.array(lo_list)
    hi = np.array(hi_list)
    owner = np.array(owner)
    vals, errs, _ = _gk_batch(f, lo, hi)
    bad = np.nonzero(errs > 0.1 * cfg.abs_tol)[0]
    for j in bad:
        vals[j] = integrate_finite(f, float(lo[j]), float(hi[j]), NO_SINGULARITY, cfg)
    out = np.zeros(len(pts) - 1, dtype=complex)
    np.add.at(out, owner, vals)
    return out


# ---------------------------------------------------------------------------
# radial Fourier transform


def _schwartz_cutoff(profile: RadialProfile, n: int, tol: float, r0: float) -> float:
    r = max(1.0, 2.0 * r0)
    for _ in range(60):
        probe = r * np.array([1.0, 1.25, 1.5, 2.0])
        if np.all(np.abs(profile(probe)) * probe ** (n + 2) < tol * 1e-3):
            return r
        r *= 1.5
    raise DomainError("Schwartz profile does not decay numerically")


def bochner_radial_ft(profile: RadialProfile, n: int, xi_norm: float,
                      cfg: QuadConfig = DEFAULT_QUAD, *, verified_cap: Optional[float] = None):
    """n-dimensional Fourier transform of a radial function at |xi| = xi_norm.

    Uses 2 pi |xi|^(1 - n/2) times the integral of r^(n/2) f(r)
    J_(n/2-1)(2 pi r |xi|) dr; at xi_norm = 0 the plain mass integral
    sigma_(n-1) times the integral of f(r) r^(n-1) dr is returned.
    """
    if int(n) != n or n < 2:
        raise DomainError("dimension must be an integer >= 2")
    if not xi_norm >= 0 or not math.isfinite(xi_norm):
        raise DomainError("xi_norm must be finite and non-negative")
    if profile.decay == "poly" and not float(profile.decay_param) > n:
        raise DomainError(f"profile decay r^-{profile.decay_param} is not integrable in R^{n}")
    nu = n / 2 - 1
    if xi_norm <= 1e-30 and profile.decay == "poly":
        xi_norm = 0.0  # continuous at 0; the difference is far below any tolerance
    if xi_norm == 0:
        lam = None
        factor = lambda r: r ** (n - 1)
        scale = sphere_area(n)
    else:
        lam = 2 * math.pi * xi_norm
        factor = lambda r: r ** (n / 2) * jv(nu, lam * r)
        # for tiny xi the normalized form below replaces this (and avoids overflow)
        scale = 2 * math.pi * xi_norm ** (1 - n / 2) if xi_norm > 1e-30 else None
    weight = lambda r: np.asarray(profile(r), dtype=complex) * factor(r)
    # breakpoints
    start = profile.support_start
    cuts = [start]
    sing_r, sing_e = (profile.singular_at or (None, 0.0))
    if sing_r is not None and sing_r > start:
        cuts.append(sing_r)
    if profile.decay == "compact":
        end = profile.outer_radius
    elif profile.decay == "schwartz":
        end = _schwartz_cutoff(profile, n, cfg.abs_tol, max(cuts))
    else:
        end = None
    if lam is not None and end is not None and lam * end < 1e-4:
        # tiny xi: the raw integrand is O(lam^nu) and would meet abs_tol trivially,
        # so use the normalized small-argument form of J_nu(x)/x^nu
        c2 = 1.0 / (4.0 * (nu + 1))
        factor = lambda r: r ** (n - 1) * (1.0 - c2 * (lam * r) ** 2)
        scale = sphere_area(n)
        weight = lambda r: np.asarray(profile(r), dtype=complex) * factor(r)
    total = 0.0 + 0.0j
    finite_end = end
    if end is None:
        if lam is None:
            finite_end = max(max(cuts) + 1.0, 2.0 * max(cuts))
        else:
            amp = lambda r: np.asarray(profile(r), dtype=complex) * r ** (n / 2)
            x0, tail, _ = oscillatory_tail(amp, nu, lam, max(1.5 * max(cuts), max(cuts) + 0.5), cfg)
            total += tail
            finite_end = x0
    pts = sorted(set(c for c in cuts if c < finite_end)) + [finite_end]
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= a:
            continue
        sing = NO_SINGULARITY
        if sing_r is not None and sing_e < 0:
            if a == sing_r:
                sing = SingularitySpec("left", sing_e)
            elif b == sing_r:
                sing = SingularitySpec("right", sing_e)
        osc = 1 if lam is None else int(math.ceil((b - a) * lam / math.pi))
        if sing.location != "none":
            total += _graded(profile, factor, a, b, sing, cfg, osc)
        else:
            total += integrate_finite(weight, a, b, sing, cfg, n_init=max(1, min(osc, 400)))
    if lam is None and end is None:
        # poly decay at xi = 0: the tail after r = a/u
        a = finite_end

        def h(u):
            r = a / u
            return weight(r) * a / (u * u)

        e = min(0.0, float(profile.decay_param) - n - 1.0)
        total += integrate_finite(h, 0.0, 1.0, SingularitySpec("left", max(e, -0.99)), cfg)
    val = scale * total
    return val.real if abs(val.imag) <= 1e-14 * max(1.0, abs(val.real)) else val


def _graded(profile, factor, a, b, sing, cfg, osc):
    """Singular piece; the substitution acts only on the chunk next to the singularity."""
    off = profile.offset_func
    sgn = 1.0 if sing.location == "left" else -1.0

    def wsing(t, d):
        fv = off(sgn * d) if off is not None else profile(t)
        return np.asarray(fv, dtype=complex) * factor(t)

    weight = lambda r: np.asarray(profile(r), dtype=complex) * factor(r)
    if osc <= 2:
        return integrate_finite(wsing, a, b, sing, cfg, pass_offset=True)
    width = (b - a) / osc
    if sing.location == "left":
        v = integrate_finite(wsing, a, a + width, sing, cfg, pass_offset=True)
        v += integrate_finite(weight, a + width, b, NO_SINGULARITY, cfg, n_init=min(osc, 400))
    else:
        v = integrate_finite(wsing, b - width, b, sing, cfg, pass_offset=True)
        v += integrate_finite(weight, a, b - width, NO_SINGULARITY, cfg, n_init=min(osc, 400))
    return v
