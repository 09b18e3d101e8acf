"""Prenex normalization.

Quantifiers are pulled to the front with fresh renaming, flipping through
negations and implication premises.  An already-prenex sentence comes back
unchanged (structurally identical), which the round-trip tests rely on.
"""

from __future__ import annotations

from itertools import count

from .ast import (
    And,
    Atom,
    EXISTS,
    FORALL,
    Formula,
    Implies,
    Not,
    Or,
    Quant,
    QuantifierBlock,
    Sentence,
    formula_rename,
    formula_variables,
    is_quantifier_free,
)


def _dual(kind: str) -> str:
    return FORALL if kind == EXISTS else EXISTS


class _FreshNames:
    def __init__(self, taken):
        self.taken = set(taken)
        self.counter = count(1)

    def fresh(self, base: str) -> str:
        if base not in self.taken:
            self.taken.add(base)
            return base
        while True:
            name = f"{base}_{next(self.counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def _pull(f: Formula, polarity: bool, fresh: _FreshNames):
    """Return (blocks, matrix) with quantifier kinds adjusted for polarity."""
    if isinstance(f, Atom):
        return [], f
    if isinstance(f, Not):
        blocks, matrix = _pull(f.child, not polarity, fresh)
        return blocks, Not(matrix)
    if isinstance(f, Implies):
        lb, lm = _pull(f.lhs, not polarity, fresh)
        rb, rm = _pull(f.rhs, polarity, fresh)
        return lb + rb, Implies(lm, rm)
    if isinstance(f, (And, Or)):
        blocks = []
        children = []
        for c in f.children:
            cb, cm = _pull(c, polarity, fresh)
            blocks.extend(cb)
            children.append(cm)
        node = And if isinstance(f, And) else Or
        return blocks, node(tuple(children))
    if isinstance(f, Quant):
        kind = f.kind if polarity else _dual(f.kind)
        mapping = {}
        for v in f.variables:
            mapping[v] = fresh.fresh(v)
        body = formula_rename(f.body, mapping) if any(
            mapping[v] != v for v in f.variables
        ) else f.body
        blocks, matrix = _pull(body, polarity, fresh)
        head = QuantifierBlock(kind, tuple(mapping[v] for v in f.variables), f.range)
        return [head] + blocks, matrix
    raise TypeError(f"not a formula: {f!r}")


def to_prenex(s) -> Sentence:
    """Normalize a Sentence (or a nested Formula) to prenex form."""
    if isinstance(s, Sentence):
        if is_quantifier_free(s.matrix):
            return s
        prefix, body = list(s.prefix), s.matrix
    else:
        prefix, body = [], s

    # Reserve names bound in the existing prefix plus free occurrences; a
    # nested variable keeps its name unless it would collide with one of
    # those or with an already-pulled quantifier.
    taken = set()
    for b in prefix:
        taken.update(b.variables)
    taken |= formula_variables(body)
    fresh = _FreshNames(taken)
    blocks, matrix = _pull(body, True, fresh)
    return Sentence(tuple(prefix) + tuple(blocks), matrix)
