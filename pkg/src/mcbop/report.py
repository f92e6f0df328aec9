"""Residual bookkeeping shared by the verification suites."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .blockmat import Mat

DEFAULT_RTOL = 1e-8


def absm(m: Mat) -> Mat:
    """Entrywise absolute values (max component for jets) as a float matrix."""
    from .ring import RR

    return m.map(lambda v: float(abs(v)), RR)


def magnitude(*terms) -> float:
    """Largest entry of ``sum |A_1||A_2|...`` over the given product chains.

    This is the usual rounding-error scale for a sum of products, so a float
    residual measured against it does not blow up when the terms cancel.
    A term is a :class:`Mat` or a tuple of matrices to be multiplied.
    """
    acc = None
    for t in terms:
        chain = t if isinstance(t, tuple) else (t,)
        prod = absm(chain[0])
        for f in chain[1:]:
            prod = prod @ absm(f)
        acc = prod if acc is None else acc + prod
    return 0.0 if acc is None else float(acc.max_abs())


@dataclass
class CheckEntry:
    identity: str
    n: Optional[int]
    status: str
    exact: bool = True
    residual: object = 0
    relative: Optional[float] = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"identity": self.identity, "n": self.n, "status": self.status}
        if self.status != "skipped":
            if self.exact:
                out["residual"] = str(Fraction(self.residual))
                out["exact_zero"] = self.residual == 0
            else:
                out["residual"] = float(self.residual)
                out["relative"] = self.relative
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class ResidualReport:
    """Per-identity, per-n residuals.  Exact rings demand literal zeros."""

    title: str = ""
    rtol: float = DEFAULT_RTOL
    entries: list = field(default_factory=list)

    def compare(self, identity: str, n, lhs: Mat, rhs: Mat, scale=None, terms=None) -> CheckEntry:
        """Record ``lhs - rhs``.  Float backends divide by ``scale``, or by the
        :func:`magnitude` of ``terms`` when given, else by ``max(|lhs|, |rhs|)``."""
        diff = lhs - rhs
        ring = diff.ring
        if ring.exact:
            res = diff.max_abs()
            entry = CheckEntry(identity, n, "pass" if res == 0 else "fail", True, res)
        else:
            res = float(diff.max_abs())
            if scale is None and terms is not None:
                scale = magnitude(*terms)
            if scale is None:
                scale = max(float(lhs.max_abs()), float(rhs.max_abs()))
            scale = float(scale)
            rel = res / scale if scale > 0 else res
            entry = CheckEntry(identity, n, "pass" if rel <= self.rtol else "fail", False, res, rel)
        self.entries.append(entry)
        return entry

    def zero(self, identity: str, n, value: Mat, scale=None) -> CheckEntry:
        return self.compare(identity, n, value, Mat.zeros(value.rows, value.cols, value.ring), scale)

    def equal(self, identity: str, n, ok: bool, detail: str = "") -> CheckEntry:
        entry = CheckEntry(identity, n, "pass" if ok else "fail", True, 0 if ok else 1, detail=detail)
        self.entries.append(entry)
        return entry

    def skip(self, identity: str, n, why: str) -> CheckEntry:
        entry = CheckEntry(identity, n, "skipped", detail=why)
        self.entries.append(entry)
        return entry

    def extend(self, other: "ResidualReport") -> "ResidualReport":
        self.entries.extend(other.entries)
        return self

    @property
    def failures(self) -> list:
        return [e for e in self.entries if e.status == "fail"]

    @property
    def ok(self) -> bool:
        return not self.failures

    def by_identity(self, identity: str) -> list:
        return [e for e in self.entries if e.identity == identity]

    def max_relative(self) -> float:
        vals = [e.relative for e in self.entries if e.relative is not None]
        return max(vals, default=0.0)

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for e in self.entries:
            out[e.status] += 1
        return out

    def to_json(self) -> dict:
        return {"title": self.title, "counts": self.counts(), "entries": [e.to_json() for e in self.entries]}

    def __repr__(self):
        return f"ResidualReport({self.title!r}, {self.counts()})"
