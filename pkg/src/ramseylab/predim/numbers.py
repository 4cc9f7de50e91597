"""Exact arithmetic in Q(sqrt d) for quadratic irrational alpha."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, total_ordering

from ..errors import InvalidInput


def _is_squarefree(d: int) -> bool:
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


def sign_p_plus_q_root(p: Fraction, q: Fraction, d: int) -> int:
    """Exact sign of ``p + q*sqrt(d)`` for rational p, q and squarefree d > 1."""
    sp = (p > 0) - (p < 0)
    sq = (q > 0) - (q < 0)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    # opposite signs: the larger square wins
    lhs = p * p
    rhs = q * q * d
    return sp if lhs > rhs else sq


@total_ordering
class QuadNumber:
    """``p + q*sqrt(d)`` with rational p, q."""

    __slots__ = ("p", "q", "d")

    def __init__(self, p, q, d: int):
        self.p = Fraction(p)
        self.q = Fraction(q)
        self.d = d

    def _coerce(self, other) -> "QuadNumber":
        if isinstance(other, QuadNumber):
            if other.d != self.d:
                raise InvalidInput("mixing different square roots")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNumber(other, 0, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNumber(self.p + o.p, self.q + o.q, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber(-self.p, -self.q, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNumber(self.p - o.p, self.q - o.q, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNumber(self.p * o.p + self.q * o.q * self.d, self.p * o.q + self.q * o.p, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadNumber":
        return QuadNumber(self.p, -self.q, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        norm = o.p * o.p - o.q * o.q * self.d
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        num = self * o.conjugate()
        return QuadNumber(num.p / norm, num.q / norm, self.d)

    def __rtruediv__(self, other):
        return QuadNumber(other, 0, self.d) / self

    def sign(self) -> int:
        return sign_p_plus_q_root(self.p, self.q, self.d)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.p == o.p and self.q == o.q

    def __hash__(self):
        return hash((self.p, self.q, self.d))

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() < 0

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(self.d)

    def floor(self) -> int:
        k = math.floor(float(self))
        while (self - k).sign() < 0:
            k -= 1
        while (self - (k + 1)).sign() >= 0:
            k += 1
        return k

    def ceil(self) -> int:
        return -((-self).floor())

    def __repr__(self):
        return f"QuadNumber({self.p}, {self.q}, {self.d})"

    def __str__(self):
        return format_quad(self.p, self.q, self.d)


def format_quad(p: Fraction, q: Fraction, d: int) -> str:
    if q == 0:
        return str(p)
    aq = abs(q)
    root = f"√{d}" if aq == 1 else (f"{aq}√{d}" if aq.denominator == 1 else f"({aq})√{d}")
    if p == 0:
        return root if q > 0 else f"-{root}"
    return f"{p}{'+' if q > 0 else '-'}{root}"


@dataclass(frozen=True)
class Alpha:
    """The irrational ``(a + b*sqrt(d)) / c`` with ``0 < alpha < 1``."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.b == 0:
            raise InvalidInput("b must be nonzero")
        if self.c <= 0:
            raise InvalidInput("c must be positive")
        if self.d <= 1 or not _is_squarefree(self.d):
            raise InvalidInput(f"d must be a squarefree integer > 1, got {self.d}")
        q = self.quad()
        if q.sign() <= 0 or (1 - q).sign() <= 0:
            raise InvalidInput(f"alpha must lie strictly between 0 and 1, got {float(q)}")

    def quad(self) -> QuadNumber:
        return QuadNumber(Fraction(self.a, self.c), Fraction(self.b, self.c), self.d)

    @cached_property
    def value(self) -> float:
        return float(self.quad())

    def __float__(self):
        return self.value

    def m(self) -> int:
        """The integer m with 1/(m+1) <= alpha <= 1/m."""
        return (1 / self.quad()).floor()

    def spec(self) -> str:
        return f"quad:{self.a},{self.b},{self.c},{self.d}"

    def __str__(self):
        return self.spec()


SQRT2_MINUS_1 = Alpha(-1, 1, 1, 2)
GOLDEN_CONJUGATE = Alpha(-1, 1, 2, 5)


def parse_alpha(text: str) -> Alpha:
    """Parse ``quad:a,b,c,d``."""
    if not text.startswith("quad:"):
        raise InvalidInput(f"alpha must look like quad:a,b,c,d, got {text!r}")
    parts = text[5:].split(",")
    if len(parts) != 4:
        raise InvalidInput(f"alpha must have four integers, got {text!r}")
    try:
        a, b, c, d = (int(x) for x in parts)
    except ValueError as exc:
        raise InvalidInput(f"bad integer in {text!r}") from exc
    return Alpha(a, b, c, d)


@total_ordering
class DeltaValue:
    """``v - alpha*e`` for rational v and e, ordered exactly."""

    __slots__ = ("v", "e", "alpha", "_f")

    def __init__(self, v, e, alpha: Alpha):
        self.v = v if isinstance(v, int) else Fraction(v)
        self.e = e if isinstance(e, int) else Fraction(e)
        self.alpha = alpha
        self._f = None

    def quad(self) -> QuadNumber:
        return self.v - self.alpha.quad() * self.e

    def __float__(self):
        if self._f is None:
            self._f = float(self.v) - self.alpha.value * float(self.e)
        return self._f

    def sign(self) -> int:
        f = float(self)
        if abs(f) > 1e-9 * (1 + abs(float(self.v)) + abs(float(self.e))):
            return 1 if f > 0 else -1
        a = self.alpha
        # c*(v - alpha*e) = (c*v - a*e) - b*e*sqrt(d)
        return sign_p_plus_q_root(Fraction(a.c * self.v - a.a * self.e), Fraction(-a.b * self.e), a.d)

    def _check(self, other):
        if not isinstance(other, DeltaValue):
            if isinstance(other, (int, Fraction)):
                return DeltaValue(other, 0, self.alpha)
            return NotImplemented
        if other.alpha != self.alpha:
            raise InvalidInput("values use different alphas")
        return other

    def __add__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return DeltaValue(self.v + o.v, self.e + o.e, self.alpha)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return DeltaValue(self.v - o.v, self.e - o.e, self.alpha)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return DeltaValue(-self.v, -self.e, self.alpha)

    def scale(self, factor) -> "DeltaValue":
        factor = Fraction(factor)
        return DeltaValue(self.v * factor, self.e * factor, self.alpha)

    def __eq__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        # alpha is irrational, so equality is componentwise
        return self.v == o.v and self.e == o.e

    def __hash__(self):
        return hash((self.v, self.e, self.alpha))

    def __lt__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() < 0

    def __repr__(self):
        return f"DeltaValue({self.v}, {self.e}, {self.alpha.spec()})"

    def __str__(self):
        q = self.quad()
        return format_quad(q.p, q.q, q.d)

    def to_json(self) -> dict:
        return {"v": str(self.v), "e": str(self.e), "exact": str(self), "approx": float(self)}
