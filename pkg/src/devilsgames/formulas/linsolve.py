"""Iterated linear closure over conjunctions of polynomial equalities.

Many constraint systems in the workbench (inversion-form chains, squeeze
bookkeeping) pin most variables uniquely through cascades of equalities that
are affine once earlier variables are fixed.  `linear_closure` repeatedly
extracts the affine subsystem, eliminates, adopts every uniquely determined
value, and resubstitutes, until nothing new is pinned.  Values are exact;
callers remain responsible for verifying any use against the full system.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .ast import Atom, Polynomial


def _affine_row(poly: Polynomial, fixed: Dict[str, Fraction]):
    """`poly` as ({var: coeff}, const) in its unfixed variables, or None."""
    coeffs: Dict[str, Fraction] = {}
    const = Fraction(0)
    for exps, c in poly.terms.items():
        unknowns = [
            (v, e)
            for v, e in zip(poly.variables, exps)
            if e and v not in fixed
        ]
        if not unknowns:
            val = Fraction(c)
            for v, e in zip(poly.variables, exps):
                if e:
                    val *= fixed[v] ** e
            const += val
            continue
        if len(unknowns) > 1 or unknowns[0][1] > 1:
            return None
        var = unknowns[0][0]
        val = Fraction(c)
        for v, e in zip(poly.variables, exps):
            if e and v in fixed:
                val *= fixed[v] ** e
        coeffs[var] = coeffs.get(var, Fraction(0)) + val
    coeffs = {v: c for v, c in coeffs.items() if c != 0}
    return coeffs, const


def _eliminate(rows: List[Tuple[Dict[str, Fraction], Fraction]]):
    """Forward elimination; returns (pinned values, contradiction flag)."""
    rows = [(dict(c), k) for c, k in rows if c or k != 0]
    pinned: Dict[str, Fraction] = {}
    contradiction = False
    order: List[str] = []
    seen = set()
    for coeffs, _ in rows:
        for v in coeffs:
            if v not in seen:
                seen.add(v)
                order.append(v)

    reduced: List[Tuple[Dict[str, Fraction], Fraction]] = []
    for coeffs, const in rows:
        coeffs = dict(coeffs)
        for pc, pk in reduced:
            pivot = next(iter(pc))
            if pivot in coeffs:
                factor = coeffs[pivot] / pc[pivot]
                for v, c in pc.items():
                    coeffs[v] = coeffs.get(v, Fraction(0)) - factor * c
                const -= factor * pk
                coeffs = {v: c for v, c in coeffs.items() if c != 0}
        if not coeffs:
            if const != 0:
                contradiction = True
            continue
        reduced.append((coeffs, const))

    # back-substitute rows that become single-variable
    changed = True
    while changed:
        changed = False
        for coeffs, const in reduced:
            live = {v: c for v, c in coeffs.items() if v not in pinned}
            shift = const
            for v, c in coeffs.items():
                if v in pinned:
                    shift += c * pinned[v]
            if not live:
                if shift != 0:
                    contradiction = True
                continue
            if len(live) == 1:
                (v, c), = live.items()
                value = -shift / c
                if v in pinned and pinned[v] != value:
                    contradiction = True
                elif v not in pinned:
                    pinned[v] = value
                    changed = True
    return pinned, contradiction


def linear_closure(
    atoms: Sequence[Atom],
    fixed: Dict[str, Fraction],
    max_rounds: int = 40,
):
    """(pinned values incl. `fixed`, contradiction flag).

    Only equality atoms participate.  A contradiction means the equalities
    are jointly unsatisfiable given `fixed`.
    """
    values = dict(fixed)
    contradiction = False
    for _ in range(max_rounds):
        rows = []
        for atom in atoms:
            if atom.rel != "=":
                continue
            row = _affine_row(atom.poly, values)
            if row is not None:
                rows.append(row)
        pinned, bad = _eliminate(rows)
        if bad:
            return values, True
        new = {v: val for v, val in pinned.items() if v not in values}
        if not new:
            break
        values.update(new)
    return values, contradiction
