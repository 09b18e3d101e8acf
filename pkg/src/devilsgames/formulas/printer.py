"""Textual and JSON serialization of formulas and sentences.

print -> parse round-trips to a structurally equal Sentence.
"""

from __future__ import annotations

from fractions import Fraction

from ..rationals import format_rat, rat_from_json, rat_to_json
from .ast import (
    AllReals,
    And,
    Atom,
    ClosedBox,
    Formula,
    Implies,
    Not,
    OpenBox,
    Or,
    Polynomial,
    Quant,
    QuantifierBlock,
    Sentence,
)


def print_range(rng) -> str:
    if isinstance(rng, AllReals):
        return ""
    if isinstance(rng, ClosedBox):
        return f" in [{format_rat(rng.lo)}, {format_rat(rng.hi)}]"
    if isinstance(rng, OpenBox):
        return f" in ({format_rat(rng.lo)}, {format_rat(rng.hi)})"
    raise TypeError(f"unprintable range {rng!r}")


def print_formula(f: Formula, parenthesize: bool = False) -> str:
    if isinstance(f, Atom):
        return f"{f.poly} {f.rel} 0"
    if isinstance(f, And):
        text = " and ".join(print_formula(c, True) for c in f.children)
    elif isinstance(f, Or):
        text = " or ".join(print_formula(c, True) for c in f.children)
    elif isinstance(f, Not):
        text = f"not {print_formula(f.child, True)}"
    elif isinstance(f, Implies):
        text = f"{print_formula(f.lhs, True)} implies {print_formula(f.rhs, True)}"
    elif isinstance(f, Quant):
        quants = " ".join(
            f"{f.kind} {v}{print_range(f.range)}" for v in f.variables
        )
        text = f"{quants}. {print_formula(f.body)}"
    else:
        raise TypeError(f"unprintable formula {f!r}")
    return f"({text})" if parenthesize else text


def print_sentence(s: Sentence) -> str:
    parts = []
    for block in s.prefix:
        for v in block.variables:
            parts.append(f"{block.quantifier} {v}{print_range(block.range)}")
    prefix = " ".join(parts)
    body = print_formula(s.matrix)
    return f"{prefix}. {body}" if prefix else body


# ---------------------------------------------------------------------------
# JSON mirror


def poly_to_json(p: Polynomial) -> dict:
    return {
        "variables": list(p.variables),
        "terms": [{"exponents": list(e), "coefficient": str(c)} for e, c in sorted(p.terms.items())],
    }


def poly_from_json(obj) -> Polynomial:
    return Polynomial(
        tuple(obj["variables"]),
        {tuple(t["exponents"]): int(t["coefficient"]) for t in obj["terms"]},
    )


def range_to_json(rng) -> dict:
    if isinstance(rng, AllReals):
        return {"kind": "reals"}
    if isinstance(rng, ClosedBox):
        return {"kind": "closed", "lo": rat_to_json(rng.lo), "hi": rat_to_json(rng.hi)}
    if isinstance(rng, OpenBox):
        return {"kind": "open", "lo": rat_to_json(rng.lo), "hi": rat_to_json(rng.hi)}
    raise TypeError(f"unserializable range {rng!r}")


def range_from_json(obj):
    kind = obj["kind"]
    if kind == "reals":
        return AllReals()
    lo = rat_from_json(obj["lo"])
    hi = rat_from_json(obj["hi"])
    return ClosedBox(lo, hi) if kind == "closed" else OpenBox(lo, hi)


def formula_to_json(f: Formula) -> dict:
    if isinstance(f, Atom):
        return {"kind": "atom", "poly": poly_to_json(f.poly), "rel": f.rel}
    if isinstance(f, And):
        return {"kind": "and", "children": [formula_to_json(c) for c in f.children]}
    if isinstance(f, Or):
        return {"kind": "or", "children": [formula_to_json(c) for c in f.children]}
    if isinstance(f, Not):
        return {"kind": "not", "child": formula_to_json(f.child)}
    if isinstance(f, Implies):
        return {"kind": "implies", "lhs": formula_to_json(f.lhs), "rhs": formula_to_json(f.rhs)}
    if isinstance(f, Quant):
        return {
            "kind": "quant",
            "quantifier": f.kind,
            "variables": list(f.variables),
            "range": range_to_json(f.range),
            "body": formula_to_json(f.body),
        }
    raise TypeError(f"unserializable formula {f!r}")


def formula_from_json(obj) -> Formula:
    kind = obj["kind"]
    if kind == "atom":
        return Atom(poly_from_json(obj["poly"]), obj["rel"])
    if kind == "and":
        return And(tuple(formula_from_json(c) for c in obj["children"]))
    if kind == "or":
        return Or(tuple(formula_from_json(c) for c in obj["children"]))
    if kind == "not":
        return Not(formula_from_json(obj["child"]))
    if kind == "implies":
        return Implies(formula_from_json(obj["lhs"]), formula_from_json(obj["rhs"]))
    if kind == "quant":
        return Quant(
            obj["quantifier"],
            tuple(obj["variables"]),
            range_from_json(obj["range"]),
            formula_from_json(obj["body"]),
        )
    raise ValueError(f"unknown formula kind {kind!r}")


def sentence_to_json(s: Sentence) -> dict:
    return {
        "prefix": [
            {
                "quantifier": b.quantifier,
                "variables": list(b.variables),
                "range": range_to_json(b.range),
            }
            for b in s.prefix
        ],
        "matrix": formula_to_json(s.matrix),
    }


def sentence_from_json(obj) -> Sentence:
    prefix = tuple(
        QuantifierBlock(b["quantifier"], tuple(b["variables"]), range_from_json(b["range"]))
        for b in obj["prefix"]
    )
    return Sentence(prefix, formula_from_json(obj["matrix"]))
