"""Scalar rings: exact rationals, order-2 jets, and checked floats.

Elements are plain Python numbers (:class:`fractions.Fraction`, ``float``) or
:class:`Jet2` instances and use the usual operators.  A :class:`Ring` object
carries what the operators cannot express: the unit test used for pivoting,
inversion with the right error, coercion and serialization.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import DivisionByZero

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text) -> Fraction:
    """Parse the strict literal syntax ``[+-]p[/q]`` with no whitespace."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational literal: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise ValueError(f"not a rational literal: {text!r}")
    value = Fraction(text)
    return value


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


class Jet2:
    """Truncated Taylor element ``c0 + c1*eps + c2*eps**2`` with ``eps**3 == 0``.

    ``c1`` is the first derivative and ``c2`` half the second derivative of
    the underlying function at the expansion point.
    """

    __slots__ = ("c0", "c1", "c2")

    def __init__(self, c0, c1=0, c2=0):
        self.c0 = c0
        self.c1 = c1
        self.c2 = c2

    @classmethod
    def variable(cls, x):
        """The jet of ``t -> x + t``."""
        return cls(x, 1, 0)

    @property
    def derivative(self):
        return self.c1

    @property
    def second_derivative(self):
        return 2 * self.c2

    def _lift(self, other):
        if isinstance(other, Jet2):
            return other
        if isinstance(other, (int, float, _RationalABC)):
            return Jet2(other, 0, 0)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2)
        if isinstance(other, (int, float, _RationalABC)):
            return Jet2(self.c0 + other, self.c1, self.c2)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.c0 - other.c0, self.c1 - other.c1, self.c2 - other.c2)
        if isinstance(other, (int, float, _RationalABC)):
            return Jet2(self.c0 - other, self.c1, self.c2)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float, _RationalABC)):
            return Jet2(other - self.c0, -self.c1, -self.c2)
        return NotImplemented

    def __neg__(self):
        return Jet2(-self.c0, -self.c1, -self.c2)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a0, a1, a2 = self.c0, self.c1, self.c2
            b0, b1, b2 = other.c0, other.c1, other.c2
            return Jet2(a0 * b0, a0 * b1 + a1 * b0, a0 * b2 + a1 * b1 + a2 * b0)
        if isinstance(other, (int, float, _RationalABC)):
            return Jet2(self.c0 * other, self.c1 * other, self.c2 * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self):
        a0 = self.c0
        if a0 == 0:
            raise DivisionByZero("jet with zero value part is not invertible")
        if isinstance(a0, int):
            a0 = Fraction(a0)
        r0 = 1 / a0
        r1 = -self.c1 * r0 * r0
        r2 = -(self.c1 * r1 + self.c2 * r0) * r0
        return Jet2(r0, r1, r2)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.c0 == other.c0 and self.c1 == other.c1 and self.c2 == other.c2

    def __hash__(self):
        if self.c1 == 0 and self.c2 == 0:
            return hash(self.c0)
        return hash((self.c0, self.c1, self.c2))

    def __abs__(self):
        # magnitude used by residual reporting and float pivoting
        return max(abs(self.c0), abs(self.c1), abs(self.c2))

    def __repr__(self):
        return f"Jet2({self.c0!r}, {self.c1!r}, {self.c2!r})"

    def __str__(self):
        return f"{self.c0} + {self.c1}e + {self.c2}e^2"


def exp_node(x) -> Jet2:
    """Jet of ``t -> exp(t*x)`` at ``t = 0``."""
    return Jet2(x * 0 + 1, x, x * x / 2)


class Ring:
    """Descriptor for one scalar backend."""

    name = "abstract"
    exact = True
    is_jet = False

    zero = 0
    one = 1

    def __call__(self, value):
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == 0

    def inv(self, a):
        if not self.is_unit(a):
            raise DivisionByZero(f"{a!r} is not invertible in {self.name}")
        return 1 / a

    def to_json(self, a):
        raise NotImplementedError

    def __repr__(self):
        return f"<ring {self.name}>"


class RationalRing(Ring):
    name = "QQ"
    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, str):
            return parse_rational(value)
        if isinstance(value, float):
            raise TypeError("refusing to coerce float into the exact rational ring")
        return Fraction(value)

    def is_unit(self, a):
        return a != 0

    def to_json(self, a):
        return format_rational(a)


class FloatRing(Ring):
    name = "RR"
    exact = False
    zero = 0.0
    one = 1.0

    def __init__(self, floor: float = 1e-12, checked: bool = True):
        self.floor = floor
        self.checked = checked

    def __call__(self, value):
        v = float(value)
        if self.checked and not math.isfinite(v):
            raise ValueError(f"non-finite float {v!r} rejected in checked mode")
        return v

    def is_unit(self, a):
        return abs(a) > self.floor

    def is_zero(self, a):
        return abs(a) <= self.floor

    def to_json(self, a):
        return float(a)


class JetRing(Ring):
    """Order-2 jets over a base ring."""

    is_jet = True

    def __init__(self, base: Ring):
        self.base = base
        self.name = f"J2({base.name})"
        self.exact = base.exact
        self.zero = Jet2(base.zero, base.zero, base.zero)
        self.one = Jet2(base.one, base.zero, base.zero)

    def __call__(self, value):
        if isinstance(value, Jet2):
            return Jet2(self.base(value.c0), self.base(value.c1), self.base(value.c2))
        if isinstance(value, (tuple, list)):
            c = [self.base(v) for v in value] + [self.base.zero] * (3 - len(value))
            return Jet2(*c)
        return Jet2(self.base(value), self.base.zero, self.base.zero)

    def is_unit(self, a):
        return self.base.is_unit(a.c0)

    def is_zero(self, a):
        return self.base.is_zero(a.c0) and self.base.is_zero(a.c1) and self.base.is_zero(a.c2)

    def inv(self, a):
        if not self.is_unit(a):
            raise DivisionByZero(f"{a!r} has non-invertible value part")
        return a.inverse()

    def to_json(self, a):
        return {"c0": self.base.to_json(a.c0), "c1": self.base.to_json(a.c1), "c2": self.base.to_json(a.c2)}


QQ = RationalRing()
RR = FloatRing()
JQQ = JetRing(QQ)
JRR = JetRing(RR)


def jet_ring(base: Ring) -> JetRing:
    if base is QQ:
        return JQQ
    if base is RR:
        return JRR
    return JetRing(base)


def backend_ring(backend: str) -> Ring:
    """Map the CLI backend name (``exact`` or ``f64``) to a base ring."""
    if backend == "exact":
        return QQ
    if backend == "f64":
        return RR
    raise ValueError(f"unknown backend {backend!r}")
