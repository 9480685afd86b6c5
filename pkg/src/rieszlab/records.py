from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Union

Number = Union[float, complex]

RULES = ("abs", "rel", "abs_or_rel")


def _plain(v):
    if isinstance(v, complex):
        if v.imag == 0.0:
            return v.real
        return {"re": v.real, "im": v.imag}
    if hasattr(v, "item"):
        return _plain(v.item())
    return v


@dataclass(frozen=True)
class VerificationRecord:
    """Outcome of one numerical identity check.

    ``rule`` states how ``passed`` was decided: ``abs`` compares abs_err
    with tol, ``rel`` compares rel_err with tol and ``abs_or_rel`` accepts
    whichever of the two is looser.
    """

    name: str
    anchor: str
    computed: Number
    reference: Number
    abs_err: float
    rel_err: float
    tol: float
    passed: bool
    rule: str = "abs"
    note: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def compare(cls, name, anchor, computed, reference, tol, rule="abs", note="", extra=None):
        if rule not in RULES:
            raise ValueError(f"unknown rule {rule!r}")
        abs_err = abs(computed - reference)
        denom = abs(reference)
        rel_err = abs_err / denom if denom > 0 else (0.0 if abs_err == 0 else math.inf)
        if rule == "abs":
            ok = abs_err <= tol
        elif rule == "rel":
            ok = rel_err <= tol
        else:
            ok = abs_err <= tol or rel_err <= tol
        return cls(name, anchor, _plain(computed), _plain(reference), float(abs_err),
                   float(rel_err), float(tol), bool(ok), rule, note, dict(extra or {}))

    @classmethod
    def predicate(cls, name, anchor, ok, computed=0.0, reference=0.0, note="", extra=None):
        """Record for a yes/no property (monotonicity, sign, bound)."""
        err = 0.0 if ok else 1.0
        return cls(name, anchor, _plain(computed), _plain(reference), err, err, 0.0,
                   bool(ok), "abs", note, dict(extra or {}))

    @classmethod
    def failure(cls, name, anchor, exc: BaseException):
        return cls(name, anchor, math.nan, math.nan, math.inf, math.inf, 0.0, False,
                   "abs", f"{type(exc).__name__}: {exc}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "computed": _plain(self.computed),
            "reference": _plain(self.reference),
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "tol": self.tol,
            "pass": self.passed,
            "rule": self.rule,
            "note": self.note,
        }
