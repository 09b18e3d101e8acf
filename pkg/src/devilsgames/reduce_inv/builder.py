"""Range-verified emission of {x=1, x+y=z, x*y=1} constraint systems.

Every emitted variable carries an exact rational interval enclosing its value
in any satisfying assignment; each macro asserts its operands and results stay
inside the quantifier ranges ([1/2,2] for emitted existentials).  Small
quantities s are represented by variables holding s + 7/8, following the
shift that moves [-1/8, 1/8] into [3/4, 1].

The multiplication macro rests on two exact identities:

    u^2 = 1/(1/u - 1/(u+1)) - u                 (inversion squaring)
    s1*s2 = ((s1+s2)/2)^2 - ((s1-s2)/2)^2       (polarization)

with affine recentering keeping every intermediate in range.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Dict, List, Optional, Tuple

from .ir import Add, Const, MulOne, ReduceError

HALF = Fraction(1, 2)
ONE = Fraction(1)
TWO = Fraction(2)
SHIFT = Fraction(7, 8)

RANGE_LO, RANGE_HI = HALF, TWO


@dataclass(frozen=True)
class Small:
    """Handle for a small quantity s, stored as variable with value s + 7/8."""

    var: str


class InvBuilder:
    def __init__(self, prefix_hint: str = "g"):
        self.constraints: List[object] = []
        self.intervals: Dict[str, Tuple[Fraction, Fraction]] = {}
        self._counter = count(1)
        self._const_cache: Dict[Fraction, str] = {}
        self._hint = prefix_hint

    # ------------------------------------------------------------------ core
    def fresh(self, lo: Fraction, hi: Fraction, tag: str = "") -> str:
        if lo > hi:
            raise ReduceError(f"inverted interval [{lo}, {hi}]")
        if lo < RANGE_LO or hi > RANGE_HI:
            raise ReduceError(
                f"variable interval [{lo}, {hi}] escapes [1/2, 2] ({tag})"
            )
        name = f"{self._hint}{next(self._counter)}"
        self.intervals[name] = (lo, hi)
        return name

    def declare(self, name: str, lo: Fraction, hi: Fraction):
        """Register an externally quantified variable (skeleton or devil)."""
        if name in self.intervals:
            raise ReduceError(f"variable {name} declared twice")
        self.intervals[name] = (Fraction(lo), Fraction(hi))

    def interval(self, name: str) -> Tuple[Fraction, Fraction]:
        return self.intervals[name]

    def _narrow(self, name: str, lo: Fraction, hi: Fraction):
        cur_lo, cur_hi = self.intervals[name]
        self.intervals[name] = (max(cur_lo, lo), min(cur_hi, hi))
        if self.intervals[name][0] > self.intervals[name][1]:
            raise ReduceError(f"interval of {name} became empty")

    # raw operations ------------------------------------------------------
    def one(self) -> str:
        return self.const(ONE)

    def add(self, x: str, y: str) -> str:
        """z with x + y = z."""
        (xl, xh), (yl, yh) = self.intervals[x], self.intervals[y]
        z = self.fresh(xl + yl, xh + yh, f"add({x},{y})")
        self.constraints.append(Add(x, y, z))
        return z

    def link_add(self, x: str, y: str, z: str):
        """Constrain x + y = z among existing variables."""
        (xl, xh), (yl, yh) = self.intervals[x], self.intervals[y]
        self._narrow(z, xl + yl, xh + yh)
        self.constraints.append(Add(x, y, z))

    def inv(self, x: str) -> str:
        """y with x * y = 1."""
        xl, xh = self.intervals[x]
        if xl <= 0:
            raise ReduceError(f"inversion of possibly nonpositive {x}")
        y = self.fresh(1 / xh, 1 / xl, f"inv({x})")
        self.constraints.append(MulOne(x, y))
        return y

    def equal(self, x: str, y: str):
        """Constrain x = y (via x + 1 = y + 1)."""
        one = self.one()
        (xl, xh), (yl, yh) = self.intervals[x], self.intervals[y]
        lo, hi = max(xl, yl), min(xh, yh)
        if lo > hi:
            raise ReduceError(f"equality {x} = {y} contradicts tracked intervals")
        self._narrow(x, lo, hi)
        self._narrow(y, lo, hi)
        t = self.fresh(lo + 1, hi + 1, f"equal({x},{y})")
        self.constraints.append(Add(x, one, t))
        self.constraints.append(Add(y, one, t))

    # constants -----------------------------------------------------------
    def const(self, value: Fraction) -> str:
        """Variable pinned exactly to `value` in [1/2, 2]."""
        value = Fraction(value)
        if value in self._const_cache:
            return self._const_cache[value]
        if not (RANGE_LO <= value <= RANGE_HI):
            raise ReduceError(f"constant {value} outside [1/2, 2]")
        name = self._build_const(value)
        self._const_cache[value] = name
        return name

    def _pin(self, value: Fraction, tag: str) -> str:
        name = self.fresh(value, value, tag)
        return name

    def _build_const(self, value: Fraction) -> str:
        if _is_dyadic(value):
            return self._build_dyadic(value)
        if value > 1:
            # halve into (1/2, 1]; both sub-builds are terminal cases
            half = self.const(value / 2)
            v = self._pin(value, f"c{value}")
            self.constraints.append(Add(half, half, v))
            return v
        # non-dyadic value in (1/2, 1): value = 7/8 + h/4 + s_rem with
        # h in {-1, 0} and |s_rem| <= 1/8; s_rem is scaled up from a
        # dyadic seed, so the recursion only ever hits dyadic builds
        s = value - SHIFT
        h = round(4 * s)
        if h > 0:
            h = 0
        s_rem = s - Fraction(h, 4)
        if abs(s_rem) > Fraction(1, 8):
            raise ReduceError(f"constant split failed for {value}")
        small = self._small_from_seed(s_rem)
        if h:
            small = self.small_shift(small, Fraction(h, 4))
        return small.var

    def _build_dyadic(self, value: Fraction) -> str:
        if value == 1:
            v = self._pin(ONE, "one")
            self.constraints.append(Const(v, ONE))
            return v
        if value == 2:
            one = self.const(ONE)
            v = self._pin(TWO, "two")
            self.constraints.append(Add(one, one, v))
            return v
        if value > 1:
            rest = value - 1 if value - 1 >= HALF else value - HALF
            other = self.const(value - rest)
            v = self._pin(value, f"d{value}")
            self.constraints.append(Add(self.const(rest), other, v))
            return v
        doubled = self.const(2 * value)
        v = self._pin(value, f"d{value}")
        self.constraints.append(Add(v, v, doubled))
        return v

    def _small_from_seed(self, s: Fraction) -> Small:
        """Small with exact value s, |s| <= 1/8, from a dyadic seed."""
        if s == 0:
            return Small(self.const(SHIFT))
        mag = abs(s)
        k = mag.numerator.bit_length() + 4
        seed_value = Fraction(1, 1 << k)
        while seed_value > mag:
            seed_value /= 2
        seed = Small(self.const(SHIFT + seed_value))  # dyadic build
        return self.small_scale(seed, s / seed_value)

    # smalls --------------------------------------------------------------
    def small_interval(self, s: Small) -> Tuple[Fraction, Fraction]:
        lo, hi = self.intervals[s.var]
        return (lo - SHIFT, hi - SHIFT)

    def small_fresh(self, lo: Fraction, hi: Fraction, tag: str = "") -> Small:
        return Small(self.fresh(lo + SHIFT, hi + SHIFT, tag))

    def small_const(self, value: Fraction) -> Small:
        return Small(self.const(value + SHIFT))

    def small_from_var(self, name: str) -> Small:
        """View a [3/4,1]-ranged raw variable as the small (value - 7/8)."""
        return Small(name)

    def small_add(self, a: Small, b: Small) -> Small:
        (al, ah), (bl, bh) = self.small_interval(a), self.small_interval(b)
        total = self.add(a.var, b.var)  # (a + b) + 7/4
        out = self.small_fresh(al + bl, ah + bh, "small_add")
        c78 = self.const(SHIFT)
        self.constraints.append(Add(out.var, c78, total))
        return out

    def small_neg(self, a: Small) -> Small:
        al, ah = self.small_interval(a)
        out = self.small_fresh(-ah, -al, "small_neg")
        c74 = self.const(Fraction(7, 4))
        self.constraints.append(Add(a.var, out.var, c74))
        return out

    def small_sub(self, a: Small, b: Small) -> Small:
        return self.small_add(a, self.small_neg(b))

    def small_equal(self, a: Small, b: Small):
        self.equal(a.var, b.var)

    def small_shift(self, a: Small, c: Fraction) -> Small:
        """Small with value a + c for a rational constant c."""
        if c == 0:
            return a
        al, ah = self.small_interval(a)
        out = self.small_fresh(al + c, ah + c, "small_shift")
        # out = a + c  <=>  out + (1 - c) = a.var + 1 ... choose D with both
        # D and D - c buildable in [1/2, 2]
        for d in (ONE, Fraction(3, 2), HALF, Fraction(5, 4), Fraction(3, 4)):
            if RANGE_LO <= d <= RANGE_HI and RANGE_LO <= d - c <= RANGE_HI:
                lo, hi = self.intervals[a.var]
                if RANGE_LO <= lo + d and hi + d <= RANGE_HI:
                    t = self.fresh(lo + d, hi + d, "small_shift_t")
                    self.constraints.append(Add(a.var, self.const(d), t))
                    self.constraints.append(Add(out.var, self.const(d - c), t))
                    return out
        raise ReduceError(f"no recentering constant for shift by {c}")

    def small_halve(self, a: Small) -> Small:
        """Small with value a/2."""
        al, ah = self.small_interval(a)
        lo, hi = self.intervals[a.var]
        one = self.one()
        if hi + 1 > RANGE_HI:
            raise ReduceError("halving operand too large")
        t = self.fresh(lo + 1, hi + 1, "halve_t")  # a.var + 1
        self.constraints.append(Add(a.var, one, t))
        xh = self.fresh((lo + 1) / 2, (hi + 1) / 2, "halve_m")  # (a.var+1)/2
        self.constraints.append(Add(xh, xh, t))
        # xh = a/2 + 15/16; subtract 1/16
        return self.small_shift(Small(xh), Fraction(-1, 16))

    def small_double(self, a: Small) -> Small:
        """Small with value 2a."""
        al, ah = self.small_interval(a)
        t = self.add(a.var, a.var)  # 2a + 7/4
        out = self.small_fresh(2 * al, 2 * ah, "small_double")
        c78 = self.const(SHIFT)
        self.constraints.append(Add(out.var, c78, t))
        return out

    def small_scale(self, a: Small, factor: Fraction) -> Small:
        """Small with value factor * a, factor any rational."""
        factor = Fraction(factor)
        if factor == 0:
            return self.small_const(Fraction(0))
        if factor < 0:
            return self.small_neg(self.small_scale(a, -factor))
        if factor == 1:
            return a
        num, den = factor.numerator, factor.denominator
        # scale down first (halving and odd division keep values shrinking),
        # then the integer double-and-add grows monotonically to the result,
        # so every intermediate stays within max(|a|, |factor*a|)
        while den % 2 == 0:
            a = self.small_halve(a)
            den //= 2
        if den > 1:
            sl, sh = self.small_interval(a)
            out = self.small_fresh(sl / den, sh / den, "small_divide")
            rebuilt = self._small_int_scale(out, den)
            self.small_equal(rebuilt, a)
            a = out
        return self._small_int_scale(a, num)

    def _small_int_scale(self, a: Small, m: int) -> Small:
        if m == 1:
            return a
        # binary double-and-add
        bits = bin(m)[2:]
        acc = a
        for bit in bits[1:]:
            acc = self.small_double(acc)
            if bit == "1":
                acc = self.small_add(acc, a)
        return acc

    def square_unit(self, v: str) -> str:
        """Raw variable holding v^2, for v ranged inside [3/4, 1]."""
        lo, hi = self.intervals[v]
        if lo < Fraction(3, 4) or hi > 1:
            raise ReduceError(f"squaring needs [3/4,1] operand, got [{lo},{hi}]")
        one = self.one()
        a = self.inv(v)  # 1/v
        b = self.add(v, one)  # v + 1
        c = self.inv(b)  # 1/(v+1)
        # d = a - c = 1/(v^2+v)
        d = self.fresh(
            1 / (hi * hi + hi), 1 / (lo * lo + lo), "square_d"
        )
        self.constraints.append(Add(c, d, a))
        e = self.inv(d)  # v^2 + v
        # square = e - v
        sq = self.fresh(lo * lo, hi * hi, "square")
        self.constraints.append(Add(v, sq, e))
        return sq

    def small_mul(self, a: Small, b: Small) -> Small:
        """Small with value a*b; operands are pre-halved to within 1/16."""
        for s in (a, b):
            lo, hi = self.small_interval(s)
            if lo < -Fraction(1, 8) or hi > Fraction(1, 8):
                raise ReduceError(
                    f"multiplication operand outside [-1/8, 1/8]: [{lo}, {hi}]"
                )
        h1 = self.small_halve(a)  # |.| <= 1/16
        h2 = self.small_halve(b)
        # M = (h1 + h2)/2 + 7/8 in [3/4, 1]; W likewise for the difference
        m = self.small_halve(self.small_add(h1, h2))
        w = self.small_halve(self.small_sub(h1, h2))
        p = self.square_unit(m.var)  # ((h1+h2)/2 + 7/8)^2
        q = self.square_unit(w.var)  # ((h1-h2)/2 + 7/8)^2
        # p - q = (m-w)(m+w) = h2 * (h1 + 7/4)  [values]
        # target t = h1*h2 = (p - q) - 7/4 * h2
        u = self.small_scale(h2, Fraction(7, 4))
        (h1l, h1h) = self.small_interval(h1)
        (h2l, h2h) = self.small_interval(h2)
        prod_lo = min(h1l * h2l, h1l * h2h, h1h * h2l, h1h * h2h)
        prod_hi = max(h1l * h2l, h1l * h2h, h1h * h2l, h1h * h2h)
        t = self.small_fresh(prod_lo, prod_hi, "small_mul_t")
        v = self.small_add(t, u)  # value (p - q) + 7/8
        # tie: v + q = p + 7/8
        t1 = self.add(v.var, q)
        c78 = self.const(SHIFT)
        t2 = self.add(p, c78)
        self.equal(t1, t2)
        # result = 4t
        return self.small_double(self.small_double(t))

    def small_mul_const_target(self, a: Small, b: Small, value: Fraction):
        """Constrain a * b = value exactly."""
        prod = self.small_mul(a, b)
        self.small_equal(prod, self.small_const(value))

    # bridging ------------------------------------------------------------
    def affine_of_var(self, name: str, slope: Fraction, intercept: Fraction) -> Small:
        """Small with value slope*(raw var) + intercept.

        Works through the var's small view (value - 7/8), so
        result = slope*small + (intercept + slope*7/8).
        """
        base = Small(name)
        scaled = self.small_scale(base, slope)
        return self.small_shift(scaled, intercept + slope * SHIFT)


def _is_dyadic(value: Fraction) -> bool:
    den = value.denominator
    return den & (den - 1) == 0
