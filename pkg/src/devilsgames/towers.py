"""Symbolic nonnegative integers built from literals, +, *, ^, and exp2.

The reduction bounds (p_l, q_l, limit realizations, variable caps) are towers
of exponents far beyond anything materializable, so they are kept as
expression trees.  Named symbolic constants (alpha, beta, gamma, tau, n, k,
d, r) may appear as leaves.  Normalization collapses literal-only subtrees;
comparison is exact on symbol-free values and otherwise uses leading-term
dominance over identical symbol sets, three-valued plus "incomparable".
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Dict, Optional, Tuple

LESS = "<"
EQUAL = "="
GREATER = ">"
INCOMPARABLE = "incomparable"

# literal folding threshold (bits) and the numeric-evaluation refusal threshold
_FOLD_BITS = 4096
MATERIALIZE_BITS = 1 << 20


class TooLargeError(ArithmeticError):
    """Raised when numeric evaluation would exceed the materialization guard."""


class SymbolicValueError(ArithmeticError):
    """Raised when numeric evaluation hits a free symbol."""


# -- expression nodes (internal); the public handle is TowerInt


@dataclass(frozen=True)
class _Lit:
    value: int


@dataclass(frozen=True)
class _Sym:
    name: str


@dataclass(frozen=True)
class _Add:
    args: tuple


@dataclass(frozen=True)
class _Mul:
    args: tuple


@dataclass(frozen=True)
class _Pow:
    base: object
    exp: object


@dataclass(frozen=True)
class _Exp2:
    exp: object


def _sort_key(node):
    if isinstance(node, _Lit):
        return (0, node.value)
    if isinstance(node, _Sym):
        return (1, node.name)
    if isinstance(node, _Pow):
        return (2, _sort_key(node.base), _sort_key(node.exp))
    if isinstance(node, _Exp2):
        return (3, _sort_key(node.exp))
    if isinstance(node, _Mul):
        return (4, tuple(_sort_key(a) for a in node.args))
    if isinstance(node, _Add):
        return (5, tuple(_sort_key(a) for a in node.args))
    raise TypeError(node)


def _normalize(node):
    if isinstance(node, (_Lit, _Sym)):
        return node
    if isinstance(node, _Add):
        flat = []
        lit = 0
        for raw in node.args:
            a = _normalize(raw)
            if isinstance(a, _Add):
                parts = a.args
            else:
                parts = (a,)
            for p in parts:
                if isinstance(p, _Lit):
                    lit += p.value
                else:
                    flat.append(p)
        flat.sort(key=_sort_key)
        if lit:
            flat.append(_Lit(lit))
        if not flat:
            return _Lit(0)
        if len(flat) == 1:
            return flat[0]
        return _Add(tuple(flat))
    if isinstance(node, _Mul):
        flat = []
        lit = 1
        for raw in node.args:
            a = _normalize(raw)
            parts = a.args if isinstance(a, _Mul) else (a,)
            for p in parts:
                if isinstance(p, _Lit):
                    if p.value == 0:
                        return _Lit(0)
                    if lit.bit_length() + p.value.bit_length() <= _FOLD_BITS:
                        lit *= p.value
                    else:
                        flat.append(p)
                else:
                    flat.append(p)
        # merge exponentials: exp2(a)*exp2(b) -> exp2(a+b)
        exps = [p.exp for p in flat if isinstance(p, _Exp2)]
        rest = [p for p in flat if not isinstance(p, _Exp2)]
        if len(exps) > 1:
            rest.append(_Exp2(_normalize(_Add(tuple(exps)))))
        elif exps:
            rest.append(_Exp2(exps[0]))
        rest.sort(key=_sort_key)
        if lit != 1:
            rest.append(_Lit(lit))
        if not rest:
            return _Lit(1)
        if len(rest) == 1:
            return rest[0]
        return _Mul(tuple(rest))
    if isinstance(node, _Pow):
        base = _normalize(node.base)
        exp = _normalize(node.exp)
        if isinstance(exp, _Lit):
            if exp.value == 0:
                return _Lit(1)
            if exp.value == 1:
                return base
            if isinstance(base, _Lit):
                est = exp.value * max(base.value.bit_length(), 1)
                if est <= _FOLD_BITS:
                    return _Lit(base.value ** exp.value)
        if isinstance(base, _Lit) and base.value >= 2 and (base.value & (base.value - 1)) == 0:
            # power-of-two base: canonicalize through exp2
            m = base.value.bit_length() - 1
            return _normalize(_Exp2(_Mul((_Lit(m), exp))))
        return _Pow(base, exp)
    if isinstance(node, _Exp2):
        exp = _normalize(node.exp)
        if isinstance(exp, _Lit) and exp.value <= 64:
            return _Lit(1 << exp.value)
        return _Exp2(exp)
    raise TypeError(node)


def _value(node, max_bits: int) -> int:
    if isinstance(node, _Lit):
        return node.value
    if isinstance(node, _Sym):
        raise SymbolicValueError(f"free symbol {node.name!r}")
    if isinstance(node, _Add):
        total = 0
        for a in node.args:
            total += _value(a, max_bits)
            if total.bit_length() > max_bits:
                raise TooLargeError("sum exceeds materialization guard")
        return total
    if isinstance(node, _Mul):
        total = 1
        for a in node.args:
            v = _value(a, max_bits)
            if total.bit_length() + v.bit_length() - 1 > max_bits:
                raise TooLargeError("product exceeds materialization guard")
            total *= v
        return total
    if isinstance(node, _Pow):
        e = _value(node.exp, max_bits)
        b = _value(node.base, max_bits)
        if b >= 2 and e * (b.bit_length() - 1) > max_bits:
            raise TooLargeError("power exceeds materialization guard")
        return b ** e
    if isinstance(node, _Exp2):
        e = _value(node.exp, max_bits)
        if e + 1 > max_bits:
            raise TooLargeError("exp2 exceeds materialization guard")
        return 1 << e
    raise TypeError(node)


# -- polynomial view over symbols (for dominance comparison)


def _to_poly(node) -> Optional[Dict[Tuple[Tuple[str, int], ...], int]]:
    """Node as {monomial: coeff} over symbols, or None if non-polynomial."""
    if isinstance(node, _Lit):
        return {(): node.value}
    if isinstance(node, _Sym):
        return {((node.name, 1),): 1}
    if isinstance(node, _Add):
        out: Dict = {}
        for a in node.args:
            p = _to_poly(a)
            if p is None:
                return None
            for m, c in p.items():
                out[m] = out.get(m, 0) + c
        return {m: c for m, c in out.items() if c}
    if isinstance(node, _Mul):
        out = {(): 1}
        for a in node.args:
            p = _to_poly(a)
            if p is None:
                return None
            nxt: Dict = {}
            for m1, c1 in out.items():
                for m2, c2 in p.items():
                    merged: Dict[str, int] = {}
                    for s, e in m1 + m2:
                        merged[s] = merged.get(s, 0) + e
                    key = tuple(sorted(merged.items()))
                    nxt[key] = nxt.get(key, 0) + c1 * c2
            out = nxt
        return {m: c for m, c in out.items() if c}
    if isinstance(node, _Pow):
        if not isinstance(node.exp, _Lit) or node.exp.value > 512:
            return None
        base = _to_poly(node.base)
        if base is None:
            return None
        result = {(): 1}
        for _ in range(node.exp.value):
            result = _to_poly_mul(result, base)
            if result is None or len(result) > 4096:
                return None
        return result
    return None


def _to_poly_mul(p1, p2):
    out: Dict = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            merged: Dict[str, int] = {}
            for s, e in m1 + m2:
                merged[s] = merged.get(s, 0) + e
            key = tuple(sorted(merged.items()))
            out[key] = out.get(key, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _poly_sign_at_least_one(diff) -> Optional[str]:
    """Sign of a symbol polynomial over the region (all symbols >= 1)."""
    if not diff:
        return EQUAL
    coeffs = list(diff.values())
    if all(c > 0 for c in coeffs):
        return GREATER
    if all(c < 0 for c in coeffs):
        return LESS
    symbols = {s for m in diff for s, _ in m}
    if len(symbols) == 1:
        # univariate: suffix sums decide positivity on [1, oo)
        (sym,) = symbols
        by_deg: Dict[int, int] = {}
        for m, c in diff.items():
            deg = m[0][1] if m else 0
            by_deg[deg] = by_deg.get(deg, 0) + c
        degs = sorted(by_deg, reverse=True)
        suffix = 0
        all_nonneg = True
        all_nonpos = True
        for d in degs:
            suffix += by_deg[d]
            if suffix < 0:
                all_nonneg = False
            if suffix > 0:
                all_nonpos = False
        total = sum(by_deg.values())
        if all_nonneg and total > 0:
            return GREATER
        if all_nonpos and total < 0:
            return LESS
    return None


# -- logarithmic bounds for exponential comparison


def _exact_log2(node):
    if isinstance(node, _Exp2):
        return node.exp
    if isinstance(node, _Lit):
        v = node.value
        if v >= 1 and (v & (v - 1)) == 0:
            return _Lit(v.bit_length() - 1)
        return None
    if isinstance(node, _Mul):
        logs = []
        for a in node.args:
            l = _exact_log2(a)
            if l is None:
                return None
            logs.append(l)
        return _normalize(_Add(tuple(logs)))
    if isinstance(node, _Pow):
        l = _exact_log2(node.base)
        if l is None:
            return None
        return _normalize(_Mul((node.exp, l)))
    return None


def _upper_log2(node):
    if isinstance(node, _Lit):
        return _Lit(max(node.value.bit_length(), 0))
    if isinstance(node, _Sym):
        return node  # log2(s) <= s for s >= 1
    if isinstance(node, _Exp2):
        return node.exp
    if isinstance(node, _Mul):
        return _normalize(_Add(tuple(_upper_log2(a) for a in node.args)))
    if isinstance(node, _Pow):
        return _normalize(_Mul((node.exp, _upper_log2(node.base))))
    if isinstance(node, _Add):
        bounds = [_normalize(b) for b in (_upper_log2(a) for a in node.args)]
        best = bounds[0]
        comparable = True
        for b in bounds[1:]:
            c = _compare_nodes(best, b, depth=2)
            if c == LESS:
                best = b
            elif c == INCOMPARABLE:
                comparable = False
                break
        if comparable:
            return _normalize(_Add((best, _Lit(len(bounds).bit_length()))))
        return _normalize(_Add(tuple(bounds) + (_Lit(len(bounds)),)))
    raise TypeError(node)


def _lower_log2(node):
    if isinstance(node, _Lit):
        return _Lit(max(node.value.bit_length() - 1, 0))
    if isinstance(node, _Sym):
        return _Lit(0)
    if isinstance(node, _Exp2):
        return node.exp
    if isinstance(node, _Mul):
        return _normalize(_Add(tuple(_lower_log2(a) for a in node.args)))
    if isinstance(node, _Pow):
        return _normalize(_Mul((node.exp, _lower_log2(node.base))))
    if isinstance(node, _Add):
        # every summand is nonnegative, so any one of them bounds from below
        bounds = [_normalize(b) for b in (_lower_log2(a) for a in node.args)]
        best = bounds[0]
        for b in bounds[1:]:
            if _compare_nodes(best, b, depth=2) == LESS:
                best = b
        return best
    raise TypeError(node)


def _compare_nodes(a, b, depth: int = 6) -> str:
    if a == b:
        return EQUAL
    # numeric when both sides materialize under the guard
    try:
        va = _value(a, _FOLD_BITS * 4)
        vb = _value(b, _FOLD_BITS * 4)
        if va < vb:
            return LESS
        if va > vb:
            return GREATER
        return EQUAL
    except (TooLargeError, SymbolicValueError):
        pass
    if depth <= 0:
        return INCOMPARABLE
    pa, pb = _to_poly(a), _to_poly(b)
    if pa is not None and pb is not None:
        diff = dict(pa)
        for m, c in pb.items():
            diff[m] = diff.get(m, 0) - c
        diff = {m: c for m, c in diff.items() if c}
        sign = _poly_sign_at_least_one(diff)
        if sign is not None:
            return sign
        return INCOMPARABLE
    la, lb = _exact_log2(a), _exact_log2(b)
    if la is not None and lb is not None:
        return _compare_nodes(la, lb, depth - 1)
    # outward log bounds: log2 is strictly monotone on positives
    try:
        if _compare_nodes(_lower_log2(a), _upper_log2(b), depth - 1) == GREATER:
            return GREATER
        if _compare_nodes(_upper_log2(a), _lower_log2(b), depth - 1) == LESS:
            return LESS
    except TypeError:
        pass
    return INCOMPARABLE


# ---------------------------------------------------------------------------
# public handle


class TowerInt:
    """Immutable symbolic nonnegative integer."""

    __slots__ = ("node",)

    def __init__(self, node):
        object.__setattr__(self, "node", _normalize(node))

    # -- constructors
    @staticmethod
    def lit(n: int) -> "TowerInt":
        if n < 0:
            raise ValueError("TowerInt literals are nonnegative")
        return TowerInt(_Lit(n))

    @staticmethod
    def sym(name: str) -> "TowerInt":
        return TowerInt(_Sym(name))

    @staticmethod
    def exp2(e) -> "TowerInt":
        return TowerInt(_Exp2(_as_node(e)))

    # -- algebra
    def __add__(self, other):
        return TowerInt(_Add((self.node, _as_node(other))))

    __radd__ = __add__

    def __mul__(self, other):
        return TowerInt(_Mul((self.node, _as_node(other))))

    __rmul__ = __mul__

    def __pow__(self, other):
        return TowerInt(_Pow(self.node, _as_node(other)))

    # -- queries
    def compare(self, other) -> str:
        return _compare_nodes(self.node, _as_node(other))

    def value(self, max_bits: int = MATERIALIZE_BITS) -> int:
        """Exact integer value; raises TooLargeError past the bit guard."""
        return _value(self.node, max_bits)

    def is_symbol_free(self) -> bool:
        def walk(n):
            if isinstance(n, _Sym):
                return False
            if isinstance(n, (_Add, _Mul)):
                return all(walk(a) for a in n.args)
            if isinstance(n, _Pow):
                return walk(n.base) and walk(n.exp)
            if isinstance(n, _Exp2):
                return walk(n.exp)
            return True

        return walk(self.node)

    def substitute(self, mapping: Dict[str, "TowerInt"]) -> "TowerInt":
        def walk(n):
            if isinstance(n, _Sym):
                repl = mapping.get(n.name)
                return repl.node if repl is not None else n
            if isinstance(n, _Add):
                return _Add(tuple(walk(a) for a in n.args))
            if isinstance(n, _Mul):
                return _Mul(tuple(walk(a) for a in n.args))
            if isinstance(n, _Pow):
                return _Pow(walk(n.base), walk(n.exp))
            if isinstance(n, _Exp2):
                return _Exp2(walk(n.exp))
            return n

        return TowerInt(walk(self.node))

    # -- identity & display
    def __eq__(self, other):
        if isinstance(other, int):
            other = TowerInt.lit(other)
        return isinstance(other, TowerInt) and self.node == other.node

    def __hash__(self):
        return hash(self.node)

    def __str__(self):
        return _render(self.node)

    def __repr__(self):
        return f"TowerInt({self})"

    # -- wire format
    def to_json(self):
        return _node_json(self.node)

    @staticmethod
    def from_json(obj) -> "TowerInt":
        return TowerInt(_node_from_json(obj))


def _as_node(x):
    if isinstance(x, TowerInt):
        return x.node
    if isinstance(x, int):
        if x < 0:
            raise ValueError("TowerInt arithmetic is over nonnegative integers")
        return _Lit(x)
    return x


def _render(node) -> str:
    if isinstance(node, _Lit):
        return str(node.value)
    if isinstance(node, _Sym):
        return node.name
    if isinstance(node, _Add):
        return "(" + " + ".join(_render(a) for a in node.args) + ")"
    if isinstance(node, _Mul):
        return "(" + "*".join(_render(a) for a in node.args) + ")"
    if isinstance(node, _Pow):
        return f"{_render(node.base)}^{_render(node.exp)}"
    if isinstance(node, _Exp2):
        return f"exp2({_render(node.exp)})"
    raise TypeError(node)


def _node_json(node):
    if isinstance(node, _Lit):
        return {"kind": "lit", "value": str(node.value)}
    if isinstance(node, _Sym):
        return {"kind": "sym", "name": node.name}
    if isinstance(node, _Add):
        return {"kind": "add", "args": [_node_json(a) for a in node.args]}
    if isinstance(node, _Mul):
        return {"kind": "mul", "args": [_node_json(a) for a in node.args]}
    if isinstance(node, _Pow):
        return {"kind": "pow", "base": _node_json(node.base), "exp": _node_json(node.exp)}
    if isinstance(node, _Exp2):
        return {"kind": "exp2", "exp": _node_json(node.exp)}
    raise TypeError(node)


def _node_from_json(obj):
    kind = obj["kind"]
    if kind == "lit":
        return _Lit(int(obj["value"]))
    if kind == "sym":
        return _Sym(obj["name"])
    if kind == "add":
        return _Add(tuple(_node_from_json(a) for a in obj["args"]))
    if kind == "mul":
        return _Mul(tuple(_node_from_json(a) for a in obj["args"]))
    if kind == "pow":
        return _Pow(_node_from_json(obj["base"]), _node_from_json(obj["exp"]))
    if kind == "exp2":
        return _Exp2(_node_from_json(obj["exp"]))
    raise ValueError(f"unknown TowerInt node {kind!r}")


@dataclass(frozen=True)
class SignedExp2:
    """exp2 of a possibly negated exponent: the lambda scaling constants."""

    exponent: TowerInt
    negative: bool = False

    def __str__(self):
        sign = "-" if self.negative else ""
        return f"exp2({sign}{self.exponent})"

    def to_json(self):
        return {"exponent": self.exponent.to_json(), "negative": self.negative}


# convenient named symbols
ALPHA = TowerInt.sym("alpha")
BETA = TowerInt.sym("beta")
GAMMA = TowerInt.sym("gamma")
