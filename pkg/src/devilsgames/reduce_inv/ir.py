"""Constraint IR for the inversion-form reductions.

Pre-conversion systems may use arbitrary rational constants, weighted
additions, and general products.  Post-conversion instances contain only
x = 1, x + y = z, and x*y = 1 over [1/2,2] existentials and [3/4,1]
universals, one variable per quantifier, strictly alternating.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from ..formulas.ast import (
    Atom,
    ClosedBox,
    EXISTS,
    FORALL,
    FormulaError,
    Polynomial,
    QuantifierBlock,
    Sentence,
    conj,
)
from ..rationals import rat_from_json, rat_to_json

EXISTS_RANGE = (Fraction(1, 2), Fraction(2))
FORALL_RANGE = (Fraction(3, 4), Fraction(1))


class ReduceError(FormulaError):
    pass


# -- pre-conversion constraints (the Upsilon stage)


@dataclass(frozen=True)
class Const:
    """x = value (value 1 or 1/8 in the paper's staging; any rational here)."""

    x: str
    value: Fraction


@dataclass(frozen=True)
class Add:
    """x + y = z, optionally weighted: cx*x + cy*y = cz*z."""

    x: str
    y: str
    z: str
    weights: Optional[Tuple[Fraction, Fraction, Fraction]] = None


@dataclass(frozen=True)
class MulGeneral:
    """x * y = z, optionally weighted: x * y = c * z (pre-conversion only)."""

    x: str
    y: str
    z: str
    weight: Optional[Fraction] = None


@dataclass(frozen=True)
class MulOne:
    """x * y = 1."""

    x: str
    y: str


Constraint = object  # Const | Add | MulGeneral | MulOne


def constraint_variables(c) -> tuple:
    if isinstance(c, Const):
        return (c.x,)
    if isinstance(c, Add):
        return (c.x, c.y, c.z)
    if isinstance(c, MulGeneral):
        return (c.x, c.y, c.z)
    if isinstance(c, MulOne):
        return (c.x, c.y)
    raise ReduceError(f"not a constraint: {c!r}")


# -- final instances


@dataclass(frozen=True)
class FotrinvInstance:
    """Strictly alternating single-variable instance over the fixed ranges."""

    prefix: tuple  # ((quantifier, var), ...)
    constraints: tuple
    manifest: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        issues = validate_instance(self)
        if issues:
            raise ReduceError("; ".join(issues))

    def variables(self) -> tuple:
        return tuple(v for _, v in self.prefix)

    def range_of(self, var: str):
        for q, v in self.prefix:
            if v == var:
                return EXISTS_RANGE if q == EXISTS else FORALL_RANGE
        raise ReduceError(f"unbound variable {var}")

    def to_sentence(self) -> Sentence:
        blocks = []
        for q, v in self.prefix:
            lo, hi = EXISTS_RANGE if q == EXISTS else FORALL_RANGE
            blocks.append(QuantifierBlock(q, (v,), ClosedBox(lo, hi)))
        atoms = [constraint_atom(c) for c in self.constraints]
        if not atoms:
            zero = Polynomial.const(0)
            atoms = [Atom(zero, "=")]
        return Sentence(tuple(blocks), conj(tuple(atoms)))

    def to_json(self) -> dict:
        return {
            "prefix": [
                {"q": "E" if q == EXISTS else "A", "var": v} for q, v in self.prefix
            ],
            "constraints": [constraint_json(c) for c in self.constraints],
            "ranges": {
                "exists": [rat_to_json(EXISTS_RANGE[0]), rat_to_json(EXISTS_RANGE[1])],
                "forall": [rat_to_json(FORALL_RANGE[0]), rat_to_json(FORALL_RANGE[1])],
            },
            "manifest": self.manifest,
        }

    @staticmethod
    def from_json(obj) -> "FotrinvInstance":
        prefix = tuple(
            (EXISTS if e["q"] == "E" else FORALL, e["var"]) for e in obj["prefix"]
        )
        constraints = tuple(constraint_from_json(c) for c in obj["constraints"])
        return FotrinvInstance(prefix, constraints, obj.get("manifest", {}))


@dataclass(frozen=True)
class RangedInstance:
    """FOTRINV instance with per-variable intervals of width <= n^(-c)."""

    prefix: tuple
    constraints: tuple
    intervals: tuple  # ((var, lo, hi), ...) aligned with prefix
    c: int
    manifest: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        base = FotrinvInstance(self.prefix, self.constraints, self.manifest)
        issues = []
        n = len(self.prefix)
        cap = Fraction(1, n ** self.c) if n else Fraction(1)
        by_var = {v: (lo, hi) for v, lo, hi in self.intervals}
        for q, v in self.prefix:
            if v not in by_var:
                issues.append(f"missing interval for {v}")
                continue
            lo, hi = by_var[v]
            if hi - lo > cap:
                issues.append(f"interval of {v} wider than n^-c: {hi - lo} > {cap}")
            rlo, rhi = EXISTS_RANGE if q == EXISTS else FORALL_RANGE
            if lo < rlo or hi > rhi:
                issues.append(f"interval of {v} outside its quantifier range")
        if issues:
            raise ReduceError("; ".join(issues))

    def to_sentence(self) -> Sentence:
        by_var = {v: (lo, hi) for v, lo, hi in self.intervals}
        blocks = []
        for q, v in self.prefix:
            lo, hi = by_var[v]
            blocks.append(QuantifierBlock(q, (v,), ClosedBox(lo, hi)))
        atoms = [constraint_atom(c) for c in self.constraints]
        if not atoms:
            atoms = [Atom(Polynomial.const(0), "=")]
        return Sentence(tuple(blocks), conj(tuple(atoms)))

    def to_json(self) -> dict:
        base = FotrinvInstance(self.prefix, self.constraints, self.manifest).to_json()
        base["intervals"] = {
            v: [rat_to_json(lo), rat_to_json(hi)] for v, lo, hi in self.intervals
        }
        base["c"] = self.c
        return base


def constraint_atom(c) -> Atom:
    if isinstance(c, Const):
        if c.value != 1:
            raise ReduceError("final instances admit only x = 1 constants")
        return Atom(Polynomial.var(c.x) - 1, "=")
    if isinstance(c, Add):
        if c.weights is not None:
            raise ReduceError("final instances admit only unweighted additions")
        return Atom(Polynomial.var(c.x) + Polynomial.var(c.y) - Polynomial.var(c.z), "=")
    if isinstance(c, MulOne):
        return Atom(Polynomial.var(c.x) * Polynomial.var(c.y) - 1, "=")
    raise ReduceError(f"constraint kind {type(c).__name__} not in the final grammar")


def constraint_json(c) -> dict:
    if isinstance(c, Const):
        return {"kind": "const1", "x": c.x}
    if isinstance(c, Add):
        return {"kind": "add", "x": c.x, "y": c.y, "z": c.z}
    if isinstance(c, MulOne):
        return {"kind": "mulone", "x": c.x, "y": c.y}
    raise ReduceError(f"unserializable constraint {c!r}")


def constraint_from_json(obj):
    kind = obj["kind"]
    if kind == "const1":
        return Const(obj["x"], Fraction(1))
    if kind == "add":
        return Add(obj["x"], obj["y"], obj["z"])
    if kind == "mulone":
        return MulOne(obj["x"], obj["y"])
    raise ReduceError(f"unknown constraint kind {kind!r}")


def validate_instance(inst: FotrinvInstance) -> List[str]:
    """Grammar purity, strict alternation, one variable per quantifier."""
    issues = []
    seen = set()
    for q, v in inst.prefix:
        if q not in (EXISTS, FORALL):
            issues.append(f"bad quantifier {q!r}")
        if v in seen:
            issues.append(f"variable {v} quantified twice")
        seen.add(v)
    for (q1, _), (q2, _) in zip(inst.prefix, inst.prefix[1:]):
        if q1 == q2:
            issues.append("quantifiers do not strictly alternate")
            break
    if inst.prefix and inst.prefix[0][0] != EXISTS:
        issues.append("instance must start with an existential quantifier")
    for c in inst.constraints:
        if isinstance(c, Const):
            if c.value != 1:
                issues.append(f"constant constraint {c.x} = {c.value} is not x = 1")
        elif isinstance(c, Add):
            if c.weights is not None:
                issues.append("weighted addition in final instance")
        elif isinstance(c, MulOne):
            pass
        else:
            issues.append(f"constraint kind {type(c).__name__} outside the grammar")
        for v in constraint_variables(c):
            if v not in seen:
                issues.append(f"constraint references unbound variable {v}")
    return issues
