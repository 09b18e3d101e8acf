"""Exact rational helpers shared by every module.

All coordinates, variable values and range bounds in the workbench are
`fractions.Fraction` values.  On the wire a rational is always the pair
``{"num": "...", "den": "..."}`` with decimal-string components, so that no
consumer ever has to round or parse floats.
"""

from __future__ import annotations

from fractions import Fraction


def rat(num, den=1) -> Fraction:
    """Build a Fraction, accepting ints, strings like '3/4', or Fractions."""
    if isinstance(num, Fraction) and den == 1:
        return num
    if isinstance(num, str) and den == 1:
        return Fraction(num)
    return Fraction(num, den)


def rat_to_json(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def rat_from_json(obj) -> Fraction:
    if isinstance(obj, dict):
        return Fraction(int(obj["num"]), int(obj["den"]))
    if isinstance(obj, str):
        return Fraction(obj)
    if isinstance(obj, int):
        return Fraction(obj)
    raise ValueError(f"not a rational encoding: {obj!r}")


def format_rat(q: Fraction) -> str:
    """Render a rational in the formula grammar (``p`` or ``p/q``)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def simplest_in_interval(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with smallest denominator (then numerator) in [lo, hi].

    Stern-Brocot style descent; used to pick tidy witness candidates.
    """
    if lo > hi:
        raise ValueError("empty interval")
    if lo == hi:
        return lo
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_in_interval(-hi, -lo)

    # 0 < lo < hi: walk the continued-fraction expansion.
    def rec(a: Fraction, b: Fraction) -> Fraction:
        fa = a.numerator // a.denominator
        if fa == a:
            return a
        if fa + 1 <= b:
            return Fraction(fa + 1)
        # both in (fa, fa+1)
        return fa + 1 / rec(1 / (b - fa), 1 / (a - fa))

    return rec(lo, hi)
