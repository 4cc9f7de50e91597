"""Integer pairs (r, s) placing r - alpha*s in a prescribed window."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from math import isqrt
from typing import Iterator

from ..errors import InvalidInput, NotFound
from .numbers import Alpha, DeltaValue, QuadNumber


@dataclass(frozen=True)
class ApproxPair:
    r: int
    s: int

    def value(self, alpha: Alpha) -> DeltaValue:
        return DeltaValue(self.r, self.s, alpha)


def _as_quad(x, alpha: Alpha) -> QuadNumber:
    if isinstance(x, QuadNumber):
        return x
    if isinstance(x, DeltaValue):
        return x.quad()
    if isinstance(x, (int, Fraction)):
        return QuadNumber(x, 0, alpha.d)
    raise InvalidInput(f"cannot use {x!r} as an exact endpoint")


def continued_fraction(alpha: Alpha) -> Iterator[int]:
    """Partial quotients of alpha, via the ``(P + sqrt D) / Q`` recurrence."""
    a, b, c, d = alpha.a, alpha.b, alpha.c, alpha.d
    # alpha = (P + sqrt(D)) / Q with D = b^2 d, sign of b folded into P and Q
    D = b * b * d
    P, Q = (a, c) if b > 0 else (-a, -c)
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    root = isqrt(D)
    while True:
        if Q > 0:
            q = (P + root) // Q
        else:
            q = -((P + root) // -Q) - 1
        yield q
        P = q * Q - P
        Q = (D - P * P) // Q


def convergents(alpha: Alpha) -> Iterator[tuple[int, int]]:
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    for q in continued_fraction(alpha):
        h0, h1 = h1, q * h1 + h0
        k0, k1 = k1, q * k1 + k0
        yield h1, k1


def approx_below(alpha: Alpha, N: int, s_cap: int = 10**12, s_min: int | None = None) -> ApproxPair:
    """First convergent r/s < alpha with ``-1/N < r - alpha*s < 0`` and ``s >= s_min``.

    ``s_min`` defaults to N + 1.  Convergents alternate around alpha and the
    ones below it are exactly those with even index.
    """
    if N < 1:
        raise InvalidInput("N must be positive")
    if s_min is None:
        s_min = N + 1
    lo = Fraction(-1, N)
    for idx, (r, s) in enumerate(convergents(alpha)):
        if s > s_cap:
            break
        if idx % 2 or s < s_min:
            continue
        val = DeltaValue(r, s, alpha)
        if val.sign() < 0 and (val - lo).sign() > 0:
            return ApproxPair(r, s)
    raise NotFound(f"no convergent with s <= {s_cap} lands in (-1/{N}, 0)")


def scan_window(
    alpha: Alpha,
    lo,
    hi,
    *,
    lo_open: bool = True,
    hi_open: bool = False,
    r_min: int = 0,
    r_cap: int = 10**6,
) -> ApproxPair:
    """Smallest r >= r_min (then smallest s) with r - alpha*s in the window."""
    lo_q, hi_q = _as_quad(lo, alpha), _as_quad(hi, alpha)
    if not lo_q < hi_q:
        raise InvalidInput("window must satisfy lo < hi")
    a = alpha.quad()
    for r in range(max(r_min, 0), r_cap + 1):
        bound = (r - hi_q) / a  # alpha*s must be >= (or >) r - hi
        s = bound.floor() + 1 if hi_open else bound.ceil()
        s = max(s, 0)
        gap = (r - a * s) - lo_q
        if gap.sign() > 0 or (not lo_open and gap.sign() == 0):
            return ApproxPair(r, s)
    raise NotFound(f"no pair with r <= {r_cap} in the window")


def hit_interval(alpha: Alpha, lo, hi, r_cap: int = 10**6, r_min: int = 0) -> ApproxPair:
    """Smallest r >= r_min with ``lo < r - alpha*s <= hi`` for some s; requires lo < hi < 0."""
    if _as_quad(hi, alpha).sign() >= 0:
        raise InvalidInput("hit_interval expects hi < 0")
    return scan_window(alpha, lo, hi, lo_open=True, hi_open=False, r_min=r_min, r_cap=r_cap)


def first_convergents(alpha: Alpha, count: int) -> list[tuple[int, int]]:
    return list(islice(convergents(alpha), count))
