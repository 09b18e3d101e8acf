"""Exact rational interval arithmetic for polynomial sign certification."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Mapping, Optional, Tuple

from .ast import Atom, Polynomial

Interval = Tuple[Fraction, Fraction]

ZERO = Fraction(0)


def make(lo, hi) -> Interval:
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError(f"inverted interval [{lo}, {hi}]")
    return (lo, hi)


def point(v) -> Interval:
    v = Fraction(v)
    return (v, v)


def add(a: Interval, b: Interval) -> Interval:
    return (a[0] + b[0], a[1] + b[1])


def neg(a: Interval) -> Interval:
    return (-a[1], -a[0])


def mul(a: Interval, b: Interval) -> Interval:
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(products), max(products))


def power(a: Interval, k: int) -> Interval:
    if k == 0:
        return point(1)
    if k % 2 == 1:
        return (a[0] ** k, a[1] ** k)
    lo, hi = abs(a[0]), abs(a[1])
    if lo > hi:
        lo, hi = hi, lo
    if a[0] <= 0 <= a[1]:
        return (ZERO, hi ** k)
    return (lo ** k, hi ** k)


def intersect(a: Interval, b: Interval) -> Optional[Interval]:
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    if lo > hi:
        return None
    return (lo, hi)


def width(a: Interval) -> Fraction:
    return a[1] - a[0]


def midpoint(a: Interval) -> Fraction:
    return (a[0] + a[1]) / 2


def divide(a: Interval, b: Interval) -> Optional[Interval]:
    """a / b, or None when 0 is interior to b (unbounded quotient)."""
    if b[0] <= 0 <= b[1]:
        return None
    inv = (1 / b[1], 1 / b[0])
    return mul(a, inv)


def sqrt_outward(a: Interval) -> Optional[Interval]:
    """Rational outer enclosure of sqrt over the nonnegative part of `a`."""
    hi = a[1]
    if hi < 0:
        return None
    lo = max(a[0], ZERO)

    def lower(q: Fraction) -> Fraction:
        # largest dyadic-ish rational <= sqrt(q)
        num, den = q.numerator, q.denominator
        scale = 1 << 64
        s = isqrt(num * den * scale * scale)
        return Fraction(s, den * scale)

    def upper(q: Fraction) -> Fraction:
        num, den = q.numerator, q.denominator
        scale = 1 << 64
        s = isqrt(num * den * scale * scale)
        return Fraction(s + 1, den * scale)

    return (lower(lo), upper(hi))


def poly_interval(p: Polynomial, box: Mapping[str, Interval]) -> Interval:
    total = point(0)
    for e, c in p.terms.items():
        term = point(c)
        for v, k in zip(p.variables, e):
            if k:
                term = mul(term, power(box[v], k))
        total = add(total, term)
    return total


def atom_state(atom: Atom, box: Mapping[str, Interval]) -> Optional[bool]:
    """Three-valued truth of `atom` over the whole box.

    True: every point of the box satisfies the atom.  False: no point does.
    None: undetermined.  Equality is certified true only when the polynomial
    is the constant zero over the box ([0, 0] interval).
    """
    lo, hi = poly_interval(atom.poly, box)
    rel = atom.rel
    if rel == "=":
        if lo == 0 == hi:
            return True
        if lo > 0 or hi < 0:
            return False
        return None
    if rel == "<":
        if hi < 0:
            return True
        if lo >= 0:
            return False
        return None
    if rel == "<=":
        if hi <= 0:
            return True
        if lo > 0:
            return False
        return None
    if rel == ">":
        if lo > 0:
            return True
        if hi <= 0:
            return False
        return None
    if rel == ">=":
        if lo >= 0:
            return True
        if hi < 0:
            return False
        return None
    raise ValueError(f"bad relation {rel!r}")
