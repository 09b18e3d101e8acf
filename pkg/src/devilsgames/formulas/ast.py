"""AST for prenex sentences over the reals.

A sentence is a quantifier prefix over atoms that compare integer-coefficient
multivariate polynomials with zero.  Rationals enter only as range bounds and
as evaluation assignments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from ..rationals import format_rat


class FormulaError(Exception):
    pass


class UndeclaredVariableError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Polynomials


class Polynomial:
    """Multivariate polynomial with integer coefficients.

    Stored canonically: variables sorted by name, no unused variables, no zero
    coefficients.  Exponent vectors align with the variable tuple.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Iterable[str], terms: Mapping[tuple, int]):
        vs = tuple(variables)
        cleaned = {tuple(e): int(c) for e, c in terms.items() if c != 0}
        # prune unused variables and sort the rest
        used = [i for i in range(len(vs)) if any(e[i] for e in cleaned)]
        kept = tuple(vs[i] for i in used)
        order = sorted(range(len(kept)), key=lambda i: kept[i])
        self.variables = tuple(kept[i] for i in order)
        self.terms = {}
        for e, c in cleaned.items():
            key = tuple(e[used[i]] for i in order)
            self.terms[key] = self.terms.get(key, 0) + c
        self.terms = {e: c for e, c in self.terms.items() if c != 0}

    # -- constructors
    @staticmethod
    def const(c: int) -> "Polynomial":
        return Polynomial((), {(): int(c)} if c else {})

    @staticmethod
    def var(name: str) -> "Polynomial":
        return Polynomial((name,), {(1,): 1})

    # -- ring operations
    def _aligned(self, other: "Polynomial"):
        vs = tuple(sorted(set(self.variables) | set(other.variables)))
        return vs, self._embed(vs), other._embed(vs)

    def _embed(self, vs: tuple) -> dict:
        idx = [vs.index(v) for v in self.variables]
        out = {}
        for e, c in self.terms.items():
            key = [0] * len(vs)
            for i, p in zip(idx, e):
                key[i] = p
            out[tuple(key)] = c
        return out

    def __add__(self, other):
        other = _coerce(other)
        vs, a, b = self._aligned(other)
        for e, c in b.items():
            a[e] = a.get(e, 0) + c
        return Polynomial(vs, a)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __neg__(self):
        return Polynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        other = _coerce(other)
        vs, a, b = self._aligned(other)
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                key = tuple(x + y for x, y in zip(e1, e2))
                out[key] = out.get(key, 0) + c1 * c2
        return Polynomial(vs, out)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return _coerce(other) - self

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        out = Polynomial.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- queries
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, v: str) -> int:
        if v not in self.variables:
            return 0
        i = self.variables.index(v)
        return max((e[i] for e in self.terms), default=0)

    def coefficient_of(self, v: str, power: int) -> "Polynomial":
        """Polynomial coefficient of v**power (in the remaining variables)."""
        if v not in self.variables:
            return self if power == 0 else Polynomial.const(0)
        i = self.variables.index(v)
        rest = self.variables[:i] + self.variables[i + 1:]
        terms = {}
        for e, c in self.terms.items():
            if e[i] == power:
                key = e[:i] + e[i + 1:]
                terms[key] = terms.get(key, 0) + c
        return Polynomial(rest, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def max_coefficient_bits(self) -> int:
        return max((abs(c).bit_length() for c in self.terms.values()), default=0)

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            val = Fraction(c)
            for v, p in zip(self.variables, e):
                if p:
                    if v not in assignment:
                        raise FormulaError(f"missing assignment for {v}")
                    val *= Fraction(assignment[v]) ** p
            total += val
        return total

    def substitute(self, mapping: Mapping[str, "Polynomial"]) -> "Polynomial":
        out = Polynomial.const(0)
        for e, c in self.terms.items():
            term = Polynomial.const(c)
            for v, p in zip(self.variables, e):
                if p:
                    term = term * (mapping.get(v, Polynomial.var(v)) ** p)
            out = out + term
        return out

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        return Polynomial(tuple(mapping.get(v, v) for v in self.variables), self.terms)

    # -- identity
    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.variables == other.variables
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.variables, tuple(sorted(self.terms.items()))))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), e)):
            c = self.terms[e]
            factors = []
            for v, p in zip(self.variables, e):
                if p == 1:
                    factors.append(v)
                elif p > 1:
                    factors.append(f"{v}^{p}")
            if not factors:
                body = str(abs(c))
            else:
                body = "*".join(factors)
                if abs(c) != 1:
                    body = f"{abs(c)}*{body}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        sign0, body0 = parts[0]
        text = ("-" if sign0 == "-" else "") + body0
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Polynomial({self})"


def _coerce(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, int):
        return Polynomial.const(x)
    raise TypeError(f"cannot coerce {x!r} to Polynomial")


# ---------------------------------------------------------------------------
# Quantifier ranges

EXISTS = "exists"
FORALL = "forall"

RELATIONS = ("=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class AllReals:
    def __str__(self):
        return "R"


@dataclass(frozen=True)
class ClosedBox:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise FormulaError(f"box with lo > hi: [{self.lo}, {self.hi}]")

    def __str__(self):
        return f"[{format_rat(self.lo)}, {format_rat(self.hi)}]"


@dataclass(frozen=True)
class OpenBox:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise FormulaError(f"box with lo > hi: ({self.lo}, {self.hi})")

    def __str__(self):
        return f"({format_rat(self.lo)}, {format_rat(self.hi)})"


VarRange = Union[AllReals, ClosedBox, OpenBox]


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Atom:
    """poly REL 0."""

    poly: Polynomial
    rel: str

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise FormulaError(f"bad relation {self.rel!r}")

    def __str__(self):
        return f"{self.poly} {self.rel} 0"


@dataclass(frozen=True)
class And:
    children: tuple

    def __str__(self):
        return "(" + " and ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True)
class Or:
    children: tuple

    def __str__(self):
        return "(" + " or ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True)
class Not:
    child: "Formula"

    def __str__(self):
        return f"(not {self.child})"


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"

    def __str__(self):
        return f"({self.lhs} implies {self.rhs})"


@dataclass(frozen=True)
class Quant:
    """A quantified subformula; only legal before prenexing."""

    kind: str
    variables: tuple
    range: VarRange
    body: "Formula"

    def __str__(self):
        rng = "" if isinstance(self.range, AllReals) else f" in {self.range}"
        quants = " ".join(f"{self.kind} {v}{rng}" for v in self.variables)
        return f"({quants}. {self.body})"


Formula = Union[Atom, And, Or, Not, Implies, Quant]


def conj(children) -> Formula:
    children = tuple(children)
    if len(children) == 1:
        return children[0]
    return And(children)


def disj(children) -> Formula:
    children = tuple(children)
    if len(children) == 1:
        return children[0]
    return Or(children)


def formula_variables(f: Formula) -> set:
    if isinstance(f, Atom):
        return set(f.poly.variables)
    if isinstance(f, (And, Or)):
        out = set()
        for c in f.children:
            out |= formula_variables(c)
        return out
    if isinstance(f, Not):
        return formula_variables(f.child)
    if isinstance(f, Implies):
        return formula_variables(f.lhs) | formula_variables(f.rhs)
    if isinstance(f, Quant):
        return (formula_variables(f.body) - set(f.variables)) | set()
    raise TypeError(f"not a formula: {f!r}")


def formula_rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.poly.rename(mapping), f.rel)
    if isinstance(f, And):
        return And(tuple(formula_rename(c, mapping) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(formula_rename(c, mapping) for c in f.children))
    if isinstance(f, Not):
        return Not(formula_rename(f.child, mapping))
    if isinstance(f, Implies):
        return Implies(formula_rename(f.lhs, mapping), formula_rename(f.rhs, mapping))
    if isinstance(f, Quant):
        inner = {k: v for k, v in mapping.items() if k not in f.variables}
        return Quant(f.kind, f.variables, f.range, formula_rename(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(c) for c in f.children)
    if isinstance(f, Not):
        return is_quantifier_free(f.child)
    if isinstance(f, Implies):
        return is_quantifier_free(f.lhs) and is_quantifier_free(f.rhs)
    return False


# ---------------------------------------------------------------------------
# Sentences


@dataclass(frozen=True)
class QuantifierBlock:
    quantifier: str
    variables: tuple
    range: VarRange = field(default_factory=AllReals)

    def __post_init__(self):
        if self.quantifier not in (EXISTS, FORALL):
            raise FormulaError(f"bad quantifier {self.quantifier!r}")
        if not self.variables:
            raise FormulaError("empty quantifier block")


@dataclass(frozen=True)
class Sentence:
    prefix: tuple
    matrix: Formula

    def __post_init__(self):
        seen = set()
        for block in self.prefix:
            for v in block.variables:
                if v in seen:
                    raise FormulaError(f"variable {v} bound twice")
                seen.add(v)
        free = formula_variables(self.matrix) - seen
        if free:
            raise UndeclaredVariableError(
                f"undeclared variable(s): {', '.join(sorted(free))}"
            )

    # -- metadata (recomputed on demand so it can never go stale)
    @property
    def tau(self) -> int:
        """Bit length of the largest coefficient appearing in the matrix."""
        return _matrix_tau(self.matrix)

    @property
    def n(self) -> int:
        """Maximum quantifier block width."""
        return max((len(b.variables) for b in self.prefix), default=0)

    @property
    def j(self) -> int:
        """Number of quantifier alternations in the prefix."""
        alts = 0
        for a, b in zip(self.prefix, self.prefix[1:]):
            if a.quantifier != b.quantifier:
                alts += 1
        return alts

    def bound_variables(self) -> tuple:
        out = []
        for b in self.prefix:
            out.extend(b.variables)
        return tuple(out)

    def negated(self) -> "Sentence":
        prefix = tuple(
            QuantifierBlock(
                FORALL if b.quantifier == EXISTS else EXISTS, b.variables, b.range
            )
            for b in self.prefix
        )
        return Sentence(prefix, Not(self.matrix))

    def __str__(self):
        from .printer import print_sentence

        return print_sentence(self)


def _matrix_tau(f: Formula) -> int:
    if isinstance(f, Atom):
        return f.poly.max_coefficient_bits()
    if isinstance(f, (And, Or)):
        return max((_matrix_tau(c) for c in f.children), default=0)
    if isinstance(f, Not):
        return _matrix_tau(f.child)
    if isinstance(f, Implies):
        return max(_matrix_tau(f.lhs), _matrix_tau(f.rhs))
    if isinstance(f, Quant):
        return _matrix_tau(f.body)
    raise TypeError(f"not a formula: {f!r}")
