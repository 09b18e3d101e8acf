"""Exact evaluation of quantifier-free formulas and negation normal form."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .ast import (
    And,
    Atom,
    Formula,
    FormulaError,
    Implies,
    Not,
    Or,
    Quant,
    conj,
    disj,
)

_NEGATED_REL = {"=": None, "<": ">=", "<=": ">", ">": "<=", ">=": "<"}


def eval_qf(m: Formula, assignment: Mapping[str, Fraction]) -> bool:
    """Exact Boolean value of a quantifier-free formula at a rational point."""
    if isinstance(m, Atom):
        value = m.poly.evaluate(assignment)
        if m.rel == "=":
            return value == 0
        if m.rel == "<":
            return value < 0
        if m.rel == "<=":
            return value <= 0
        if m.rel == ">":
            return value > 0
        return value >= 0
    if isinstance(m, And):
        return all(eval_qf(c, assignment) for c in m.children)
    if isinstance(m, Or):
        return any(eval_qf(c, assignment) for c in m.children)
    if isinstance(m, Not):
        return not eval_qf(m.child, assignment)
    if isinstance(m, Implies):
        return (not eval_qf(m.lhs, assignment)) or eval_qf(m.rhs, assignment)
    if isinstance(m, Quant):
        raise FormulaError("eval_qf requires a quantifier-free formula")
    raise TypeError(f"not a formula: {m!r}")


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form over {And, Or, Atom}; negation is exact on atoms.

    not(p = 0) becomes (p < 0 or p > 0); the ordering relations flip.
    """
    if isinstance(f, Atom):
        if not negate:
            return f
        flipped = _NEGATED_REL[f.rel]
        if flipped is None:
            return Or((Atom(f.poly, "<"), Atom(f.poly, ">")))
        return Atom(f.poly, flipped)
    if isinstance(f, Not):
        return nnf(f.child, not negate)
    if isinstance(f, Implies):
        return nnf(Or((Not(f.lhs), f.rhs)), negate)
    if isinstance(f, And):
        children = tuple(nnf(c, negate) for c in f.children)
        return disj(children) if negate else conj(children)
    if isinstance(f, Or):
        children = tuple(nnf(c, negate) for c in f.children)
        return conj(children) if negate else disj(children)
    if isinstance(f, Quant):
        raise FormulaError("nnf expects a quantifier-free formula")
    raise TypeError(f"not a formula: {f!r}")


def dnf_branches(f: Formula, limit: int = 4096):
    """All conjunction branches (lists of Atoms) of an NNF formula.

    Raises FormulaError when the expansion would exceed `limit` branches.
    """
    if isinstance(f, Atom):
        return [[f]]
    if isinstance(f, And):
        branches = [[]]
        for c in f.children:
            expanded = dnf_branches(c, limit)
            branches = [a + b for a in branches for b in expanded]
            if len(branches) > limit:
                raise FormulaError("DNF expansion too large")
        return branches
    if isinstance(f, Or):
        out = []
        for c in f.children:
            out.extend(dnf_branches(c, limit))
            if len(out) > limit:
                raise FormulaError("DNF expansion too large")
        return out
    raise FormulaError("dnf_branches expects an NNF formula")
