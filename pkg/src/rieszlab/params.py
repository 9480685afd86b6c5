"""Parameter and profile types shared across modules."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


@dataclass(frozen=True)
class FracParam:
    """Fractional order s in (0, 1), dimension n >= 2 and radius r > 0."""

    s: float
    n: int
    r: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")
        if not (0.0 < self.s < 1.0):
            raise DomainError(f"s out of (0,1): {self.s}")
        if not self.r > 0:
            raise DomainError(f"radius must be positive, got {self.r}")

    @property
    def sigma(self) -> float:
        return sphere_area(self.n)

    @property
    def endpoint_p(self) -> float:
        """Lebesgue exponent 2(n+1)/(n+1+2s) of the L^2 restriction estimate."""
        return 2.0 * (self.n + 1) / (self.n + 1 + 2 * self.s)


DECAY_CLASSES = ("schwartz", "poly", "compact")


@dataclass(frozen=True)
class RadialProfile:
    """A radial function f(x) = f*(|x|) with decay and singularity metadata.

    ``func`` must accept a numpy array of radii.  ``decay`` is one of
    ``schwartz``, ``poly`` (|f| <= C r^-decay_param) or ``compact`` (f = 0
    beyond decay_param).  ``singular_at = (radius, exponent)`` declares an
    integrable |r - radius|^exponent singularity; ``support_start`` is a
    radius below which f vanishes identically.  The optional
    ``offset_func(d)`` evaluates f at singular radius + d without forming
    that sum, for accurate quadrature next to the singularity.
    """

    func: Callable[[np.ndarray], np.ndarray]
    decay: str = "schwartz"
    decay_param: Optional[float] = None
    singular_at: Optional[Tuple[float, float]] = None
    support_start: float = 0.0
    sup_norm: Optional[float] = None
    label: str = ""
    offset_func: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.decay not in DECAY_CLASSES:
            raise DomainError(f"unknown decay class {self.decay!r}")
        if self.decay in ("poly", "compact") and self.decay_param is None:
            raise DomainError(f"decay class {self.decay!r} needs decay_param")
        if self.singular_at is not None and not self.singular_at[1] > -1:
            raise DomainError("singularity exponent must exceed -1")
        if os.environ.get("RIESZLAB_DEBUG"):
            self.spot_check()

    def __call__(self, r):
        return self.func(np.asarray(r, dtype=float))

    @property
    def outer_radius(self) -> float:
        return float(self.decay_param) if self.decay == "compact" else math.inf

    def spot_check(self, samples: int = 24) -> None:
        """Sample the function and reject decay metadata it visibly violates."""
        base = max(1.0, self.support_start, (self.singular_at or (0.0, 0.0))[0]) * 2.0
        if self.decay == "compact":
            r = self.outer_radius * (1.0 + np.geomspace(1e-3, 10.0, samples))
            if np.any(np.abs(self(r)) > 0):
                raise DomainError("profile is nonzero outside its declared compact support")
            return
        r = base * np.geomspace(1.0, 1e3, samples)
        v = np.abs(self(r))
        if self.decay == "poly":
            scaled = v * r ** float(self.decay_param)
        else:
            scaled = v * r**8
        if not np.all(np.isfinite(scaled)) or scaled[-1] > 10.0 * max(scaled[0], 1e-300) + 1e-12:
            raise DomainError(f"profile does not show its declared {self.decay} decay")

    def integrable_against(self, power: float) -> bool:
        """Whether f(r) r^power is integrable at infinity."""
        if self.decay in ("schwartz", "compact"):
            return True
        return float(self.decay_param) > power + 1.0

    def dilate(self, lam: float) -> "RadialProfile":
        """The profile r -> f(lam r)."""
        f = self.func
        sing = None
        if self.singular_at is not None:
            sing = (self.singular_at[0] / lam, self.singular_at[1])
        param = self.decay_param
        if self.decay == "compact":
            param = self.decay_param / lam
        off = None
        if self.offset_func is not None:
            g = self.offset_func
            off = lambda d: g(lam * d)
        return RadialProfile(lambda r: f(lam * r), self.decay, param, sing,
                             self.support_start / lam, self.sup_norm, f"{self.label}(x{lam:g})", off)

    # Common profiles ---------------------------------------------------

    @classmethod
    def gaussian(cls, a: float = math.pi) -> "RadialProfile":
        """exp(-a r^2); for a = pi this is its own Fourier transform."""
        return cls(lambda r: np.exp(-a * r * r), "schwartz", sup_norm=1.0, label=f"gauss({a:g})")

    @classmethod
    def constant(cls, c: float = 1.0) -> "RadialProfile":
        return cls(lambda r: np.full(np.shape(r), float(c)), "poly", 0.0, sup_norm=abs(c),
                   label=f"const({c:g})")

    @classmethod
    def ball_indicator(cls, radius: float = 1.0) -> "RadialProfile":
        return cls(lambda r: (r <= radius).astype(float), "compact", radius, sup_norm=1.0,
                   label="ball")

    @classmethod
    def bochner_riesz(cls, z: float) -> "RadialProfile":
        """(1 - r^2)_+^z / Gamma(z + 1) for z > -1."""
        if not z > -1:
            raise DomainError("Bochner-Riesz exponent must exceed -1")
        g = 1.0 / math.gamma(z + 1.0)

        def f(r):
            u = np.clip(1.0 - r * r, 0.0, None)
            with np.errstate(divide="ignore"):
                out = np.where(r < 1.0, u**z * g, 0.0)
            return out

        def off(d):
            # r = 1 + d with d < 0, so 1 - r^2 = -d (2 + d)
            d = np.asarray(d, dtype=float)
            return np.where(d < 0, (np.maximum(-d * (2.0 + d), 0.0)) ** z * g, 0.0)

        sing = (1.0, z) if z < 0 else None
        return cls(f, "compact", 1.0, sing, label=f"bochner_riesz({z:g})",
                   offset_func=off if z < 0 else None)
