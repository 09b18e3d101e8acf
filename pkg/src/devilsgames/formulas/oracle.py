"""Desk-scale three-valued truth oracle for bounded sentences.

Branch-and-bound over the quantifier tree with exact rational interval
arithmetic.  Existentials resolve True only through a verified rational
witness (or a whole-box certification); universals resolve False only through
a verified counterexample point or counter-box.  Equality atoms are treated
as satisfied over a box only when certified identically zero and as violated
only when the interval excludes zero; everything else is Unknown until the
depth budget runs out.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Tuple

from ..rationals import simplest_in_interval
from . import intervals as iv
from .ast import (
    And,
    Atom,
    ClosedBox,
    EXISTS,
    FORALL,
    Formula,
    FormulaError,
    OpenBox,
    Or,
    Polynomial,
    Sentence,
)
from .evaluate import dnf_branches, eval_qf, nnf

TRUE = "True"
FALSE = "False"
UNKNOWN = "Unknown"


class OracleError(FormulaError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    max_depth: int = 18
    tolerance: Fraction = Fraction(1, 2 ** 24)
    node_budget: int = 400_000
    search_pops: int = 400

    def __post_init__(self):
        if self.tolerance <= 0:
            raise OracleError("nonpositive tolerance")


@dataclass(frozen=True)
class Verdict:
    value: str
    certificate: Optional[dict] = None
    unresolved: tuple = ()

    def __bool__(self):  # pragma: no cover - guard against accidental truthiness
        raise TypeError("Verdict is three-valued; compare .value explicitly")


@dataclass
class _Var:
    quantifier: str
    name: str
    lo: Fraction
    hi: Fraction
    open: bool

    @property
    def empty(self) -> bool:
        return self.open and self.lo >= self.hi


class _Budget:
    __slots__ = ("nodes", "unresolved")

    def __init__(self, nodes: int):
        self.nodes = nodes
        self.unresolved: List[dict] = []

    def spend(self) -> bool:
        self.nodes -= 1
        return self.nodes > 0

    def note_unresolved(self, env):
        if len(self.unresolved) < 16:
            self.unresolved.append(
                {k: (str(v[0]), str(v[1])) for k, v in env.items()}
            )


def _normalize_branch(atoms: List[Atom]) -> List[Atom]:
    """Collapse complementary inequality pairs (p>=0 and p<=0) to p=0."""
    ge = {a.poly for a in atoms if a.rel == ">="}
    le = {a.poly for a in atoms if a.rel == "<="}
    both = ge & le
    out = [a for a in atoms if not (a.poly in both and a.rel in (">=", "<="))]
    out.extend(Atom(p, "=") for p in sorted(both, key=str))
    return out


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    ns, ds = isqrt(q.numerator), isqrt(q.denominator)
    if ns * ns == q.numerator and ds * ds == q.denominator:
        return Fraction(ns, ds)
    return None


def _matrix_state(f: Formula, box) -> Optional[bool]:
    """Three-valued evaluation of an NNF formula over a box."""
    if isinstance(f, Atom):
        return iv.atom_state(f, box)
    if isinstance(f, And):
        result: Optional[bool] = True
        for c in f.children:
            s = _matrix_state(c, box)
            if s is False:
                return False
            if s is None:
                result = None
        return result
    if isinstance(f, Or):
        result: Optional[bool] = False
        for c in f.children:
            s = _matrix_state(c, box)
            if s is True:
                return True
            if s is None:
                result = None
        return result
    raise OracleError(f"matrix not in NNF: {f!r}")


# ---------------------------------------------------------------------------
# Branch contraction


def _contract_linear(atom: Atom, v: str, box) -> Optional[iv.Interval]:
    """Contracted interval for v from `atom`, or None when no contraction."""
    p = atom.poly
    deg = p.degree_in(v)
    if deg not in (1, 2):
        return None
    if deg == 1:
        a_poly = p.coefficient_of(v, 1)
        b_poly = p.coefficient_of(v, 0)
        a_iv = iv.poly_interval(a_poly, box)
        b_iv = iv.poly_interval(b_poly, box)
        quotient = iv.divide(iv.neg(b_iv), a_iv)
        if quotient is None:
            return None
        rel = atom.rel
        if rel == "=":
            return quotient
        # a*v + b <= 0  <=>  v <= max(-b/a) when a > 0, v >= min(-b/a) when a < 0
        flip = a_iv[0] < 0
        if rel in ("<", "<="):
            upper = not flip
        elif rel in (">", ">="):
            upper = flip
        else:
            return None
        # possibly-inverted tuples are fine: intersect() maps them to empty
        if upper:
            return (box[v][0], quotient[1])
        return (quotient[0], box[v][1])
    # pure even quadratic: p = a*v^2 + b with no linear term
    if not p.coefficient_of(v, 1).is_zero() or atom.rel != "=":
        return None
    a_iv = iv.poly_interval(p.coefficient_of(v, 2), box)
    b_iv = iv.poly_interval(p.coefficient_of(v, 0), box)
    square = iv.divide(iv.neg(b_iv), a_iv)
    if square is None:
        return None
    root = iv.sqrt_outward(square)
    if root is None:
        return None  # v^2 must be negative: handled by atom_state elsewhere
    lo, hi = box[v]
    if lo >= 0:
        return root
    if hi <= 0:
        return iv.neg(root)
    return (-root[1], root[1])


def _contract_branch(
    atoms: List[Atom],
    box: Dict[str, iv.Interval],
    searchable: frozenset,
    rounds: int = 12,
):
    """Fixpoint contraction.  Returns (ok, box'); ok=False means infeasible.

    Only `searchable` (existentially searched) variables are narrowed;
    narrowing an outer boxed variable would be unsound for True verdicts.
    Contraction preserves all solutions, so an empty result certifies that
    the conjunction has no solution anywhere in the original box.
    """
    box = dict(box)
    for _ in range(rounds):
        changed = False
        for atom in atoms:
            state = iv.atom_state(atom, box)
            if state is False:
                return False, box
            if state is True:
                continue
            for v in atom.poly.variables:
                if v not in searchable:
                    continue
                contracted = _contract_linear(atom, v, box)
                if contracted is None:
                    continue
                merged = iv.intersect(box[v], contracted)
                if merged is None:
                    return False, box
                if iv.width(merged) < iv.width(box[v]):
                    box[v] = merged
                    changed = True
        if not changed:
            break
    return True, box


def _forced_value(atoms: List[Atom], v: str, box) -> Optional[Fraction]:
    """Exact value for v forced by an equality whose other variables are points."""
    for atom in atoms:
        if atom.rel != "=" or v not in atom.poly.variables:
            continue
        p = atom.poly
        others_fixed = all(
            box[u][0] == box[u][1] for u in p.variables if u != v
        )
        if not others_fixed:
            continue
        env = {u: box[u][0] for u in p.variables if u != v}
        deg = p.degree_in(v)
        if deg == 1:
            a = p.coefficient_of(v, 1).evaluate(env)
            b = p.coefficient_of(v, 0).evaluate(env)
            if a != 0:
                return Fraction(-b, 1) / a
        elif deg == 2 and p.coefficient_of(v, 1).is_zero():
            a = p.coefficient_of(v, 2).evaluate(env)
            b = p.coefficient_of(v, 0).evaluate(env)
            if a != 0:
                root = _rational_sqrt(Fraction(-b, 1) / a)
                if root is not None:
                    lo, hi = box[v]
                    if lo <= root <= hi:
                        return root
                    if lo <= -root <= hi:
                        return -root
    return None


class _Decider:
    def __init__(self, variables: List[_Var], matrix: Formula, cfg: OracleConfig):
        self.vars = variables
        self.matrix = matrix  # NNF
        self.cfg = cfg
        self.budget = _Budget(cfg.node_budget)
        self.matrix_vars = set()
        self._collect_vars(matrix)
        try:
            self.branches = [_normalize_branch(b) for b in dnf_branches(matrix)]
        except FormulaError:
            self.branches = None
        try:
            self.anti_branches = [
                _normalize_branch(b) for b in dnf_branches(nnf(matrix, negate=True))
            ]
        except FormulaError:
            self.anti_branches = None

    def _collect_vars(self, f: Formula):
        if isinstance(f, Atom):
            self.matrix_vars |= set(f.poly.variables)
        elif isinstance(f, (And, Or)):
            for c in f.children:
                self._collect_vars(c)

    # -- entry
    def decide(self) -> Tuple[Optional[bool], dict]:
        env: Dict[str, iv.Interval] = {}
        return self._decide(0, env)

    def _interval_of(self, var: _Var) -> iv.Interval:
        return (var.lo, var.hi)

    def _decide(self, i: int, env) -> Tuple[Optional[bool], dict]:
        if not self.budget.spend():
            self.budget.note_unresolved(env)
            return None, {}
        if i == len(self.vars):
            return _matrix_state(self.matrix, env), {}

        var = self.vars[i]
        if var.empty:
            # quantification over the empty set
            return (var.quantifier == FORALL), {}

        # a variable the matrix never mentions cannot affect truth
        if var.name not in self.matrix_vars:
            outcome, cert = self._decide(i + 1, dict(env, **{var.name: self._interval_of(var)}))
            if outcome is not None:
                cert = dict(cert)
                cert[var.name] = ("any", None)
            return outcome, cert

        # all-existential tail over a conjunction: feasibility search
        if self.branches is not None and all(
            self.vars[k].quantifier == EXISTS or self.vars[k].name not in self.matrix_vars
            for k in range(i, len(self.vars))
        ):
            return self._feasibility_tail(i, env)

        return self._search(i, self._interval_of(var), env, self.cfg.max_depth)

    # -- generic quantifier search
    def _search(self, i: int, itv: iv.Interval, env, depth) -> Tuple[Optional[bool], dict]:
        """Breadth-first branch and bound on one quantified variable.

        For an existential the `want` verdict (True) is certified by a single
        point or sub-box; the opposite verdict requires every piece of the
        cover to resolve False.  Universals are the mirror image.
        """
        var = self.vars[i]
        want = var.quantifier == EXISTS

        # forced candidates (exact solutions of branch equalities) are the
        # cheap decisive probes; try them before any box descent
        tried = set()
        for candidate in self._forced_candidates(i, itv, env, want):
            if candidate in tried:
                continue
            tried.add(candidate)
            outcome, cert = self._decide(
                i + 1, dict(env, **{var.name: iv.point(candidate)})
            )
            if outcome is not None and outcome == want:
                cert = dict(cert)
                cert[var.name] = ("point", candidate)
                return outcome, cert

        queue: deque = deque([(itv, depth)])
        fully_resolved = True
        pops = 0
        while queue:
            pops += 1
            if self.budget.nodes <= 0 or pops > self.cfg.search_pops:
                fully_resolved = False
                break
            box, d = queue.popleft()
            outcome, cert = self._decide(i + 1, dict(env, **{var.name: box}))
            if outcome is not None and outcome == want:
                cert = dict(cert)
                cert[var.name] = ("box", box)
                return outcome, cert
            if outcome is not None:
                continue  # this piece resolved against `want`
            if d <= 0 or iv.width(box) < self.cfg.tolerance:
                self.budget.note_unresolved(dict(env, **{var.name: box}))
                fully_resolved = False
                continue
            for candidate in self._point_candidates(i, box, env, want):
                if candidate in tried:
                    continue
                tried.add(candidate)
                outcome, cert = self._decide(
                    i + 1, dict(env, **{var.name: iv.point(candidate)})
                )
                if outcome is not None and outcome == want:
                    cert = dict(cert)
                    cert[var.name] = ("point", candidate)
                    return outcome, cert
            mid = iv.midpoint(box)
            queue.append(((box[0], mid), d - 1))
            queue.append(((mid, box[1]), d - 1))
        if fully_resolved:
            return (not want), {var.name: ("box", itv)}
        return None, {}

    def _forced_candidates(self, i: int, itv: iv.Interval, env, want: bool) -> List[Fraction]:
        var = self.vars[i]
        sources = self.branches if want else self.anti_branches
        if sources is None:
            return []
        box = dict(env, **{var.name: itv})
        for u in self.matrix_vars:
            box.setdefault(u, self._hull(u))
        out = []
        for branch in sources:
            forced = _forced_value(branch, var.name, box)
            if forced is not None and self._admissible(var, forced, itv):
                out.append(forced)
        return out

    def _point_candidates(self, i: int, itv: iv.Interval, env, want: bool) -> List[Fraction]:
        # A point certifying `want` must satisfy some DNF branch of the
        # matrix (want=True) or of its negation (want=False); equalities in
        # those branches force exact candidate values.
        var = self.vars[i]
        out: List[Fraction] = list(self._forced_candidates(i, itv, env, want))
        lo, hi = itv
        out.append(simplest_in_interval(lo, hi))
        out.append(iv.midpoint(itv))
        if not var.open:
            out.extend((lo, hi))
        seen = set()
        keep = []
        for c in out:
            if c in seen:
                continue
            seen.add(c)
            if self._admissible(var, c, itv):
                keep.append(c)
        return keep

    def _hull(self, name: str) -> iv.Interval:
        for v in self.vars:
            if v.name == name:
                return (v.lo, v.hi)
        raise OracleError(f"unbound matrix variable {name}")

    @staticmethod
    def _admissible(var: _Var, c: Fraction, itv: iv.Interval) -> bool:
        if not (itv[0] <= c <= itv[1]):
            return False
        if var.open and not (var.lo < c < var.hi):
            return False
        return True

    # -- all-existential feasibility
    def _feasibility_tail(self, i: int, env) -> Tuple[Optional[bool], dict]:
        tail = self.vars[i:]
        box = dict(env)
        searchable = set()
        for v in tail:
            if v.empty:
                return (v.quantifier == FORALL), {}
            box[v.name] = (v.lo, v.hi)
            if v.quantifier == EXISTS:
                searchable.add(v.name)
        searchable = frozenset(searchable & self.matrix_vars)

        outer_boxed = any(
            box[n][0] != box[n][1]
            for n in self.matrix_vars
            if n in box and n not in searchable
        )
        results = []
        witness_cert: dict = {}
        for branch in self.branches:
            allowance = [300 if outer_boxed else 6000]
            res, witness = self._branch_feasible(
                branch, box, searchable, self.cfg.max_depth, allowance
            )
            if res is True:
                for v in tail:
                    if v.name in witness:
                        witness_cert[v.name] = ("point", witness[v.name])
                    else:
                        witness_cert[v.name] = ("any", None)
                return True, witness_cert
            results.append(res)
        if all(r is False for r in results):
            return False, {v.name: ("box", box[v.name]) for v in tail}
        return None, {}

    def _branch_feasible(
        self, atoms: List[Atom], box, searchable: frozenset, depth, allowance
    ) -> Tuple[Optional[bool], dict]:
        """Feasibility of a conjunction; only `searchable` variables are assigned.

        True means: for every value of the non-searchable boxed variables
        there is an assignment of the searchable ones (the returned witness)
        satisfying every atom.  False means the conjunction has no solution
        anywhere in the box.
        """
        allowance[0] -= 1
        if allowance[0] <= 0 or not self.budget.spend():
            return None, {}
        ok, box = _contract_branch(atoms, box, searchable)
        if not ok:
            return False, {}

        states = [iv.atom_state(a, box) for a in atoms]
        if all(s is True for s in states):
            witness = self._witness_from_box(box, searchable)
            if witness is not None:
                return True, witness

        pending = [
            name for name in searchable if box[name][0] != box[name][1]
        ]
        if not pending:
            outer_boxed = any(
                box[n][0] != box[n][1]
                for a in atoms
                for n in a.poly.variables
                if n not in searchable
            )
            if outer_boxed:
                # cannot certify by evaluation; the interval states above
                # were inconclusive and no searchable freedom remains
                return None, {}
            env = {n: box[n][0] for a in atoms for n in a.poly.variables}
            value = all(eval_qf(a, env) for a in atoms)
            witness = {n: box[n][0] for n in searchable}
            return (True, witness) if value else (False, {})

        # forced assignments first
        for name in pending:
            forced = _forced_value(atoms, name, box)
            if forced is not None:
                v = self._var_by_name(name)
                if not (box[name][0] <= forced <= box[name][1]):
                    return False, {}
                if v is not None and v.open and not (v.lo < forced < v.hi):
                    return False, {}
                return self._branch_feasible(
                    atoms, dict(box, **{name: iv.point(forced)}), searchable, depth, allowance
                )

        if depth <= 0:
            return None, {}

        # pick the widest pending variable, try tidy points, then split
        name = max(pending, key=lambda n: iv.width(box[n]))
        lo, hi = box[name]
        v = self._var_by_name(name)
        unknown = False
        for c in (simplest_in_interval(lo, hi), iv.midpoint((lo, hi)), lo, hi):
            if v is not None and not self._admissible(v, c, (lo, hi)):
                continue
            res, witness = self._branch_feasible(
                atoms, dict(box, **{name: iv.point(c)}), searchable, depth - 1, allowance
            )
            if res is True:
                return True, witness
            if res is None:
                unknown = True
        mid = iv.midpoint((lo, hi))
        res_l, wit_l = self._branch_feasible(
            atoms, dict(box, **{name: (lo, mid)}), searchable, depth - 1, allowance
        )
        if res_l is True:
            return True, wit_l
        res_r, wit_r = self._branch_feasible(
            atoms, dict(box, **{name: (mid, hi)}), searchable, depth - 1, allowance
        )
        if res_r is True:
            return True, wit_r
        if res_l is False and res_r is False and not unknown:
            return False, {}
        return None, {}

    def _var_by_name(self, name: str) -> Optional[_Var]:
        for v in self.vars:
            if v.name == name:
                return v
        return None

    def _witness_from_box(self, box, searchable: frozenset) -> Optional[dict]:
        witness = {}
        for name in searchable:
            lo, hi = box[name]
            if lo == hi:
                witness[name] = lo
                continue
            v = self._var_by_name(name)
            if v is not None and v.open:
                wlo, whi = max(lo, v.lo), min(hi, v.hi)
                c = simplest_in_interval(wlo, whi)
                if not (v.lo < c < v.hi):
                    c = (wlo + whi) / 2
                if not (v.lo < c < v.hi):
                    return None
                witness[name] = c
            else:
                witness[name] = simplest_in_interval(lo, hi)
        return witness


def decide_bounded(sentence: Sentence, cfg: OracleConfig = OracleConfig()) -> Verdict:
    """Sound three-valued truth of a sentence whose ranges are all finite boxes."""
    variables: List[_Var] = []
    for block in sentence.prefix:
        rng = block.range
        if isinstance(rng, ClosedBox):
            lo, hi, is_open = rng.lo, rng.hi, False
        elif isinstance(rng, OpenBox):
            lo, hi, is_open = rng.lo, rng.hi, True
        else:
            raise OracleError(
                f"decide_bounded requires boxed ranges; block {block.variables} has {rng}"
            )
        for v in block.variables:
            variables.append(_Var(block.quantifier, v, lo, hi, is_open))

    matrix = nnf(sentence.matrix)
    decider = _Decider(variables, matrix, cfg)
    outcome, cert = decider.decide()
    unresolved = tuple(
        tuple(sorted(region.items())) for region in decider.budget.unresolved
    )
    if outcome is True:
        return Verdict(TRUE, {"kind": "witness", "assignment": _cert_json(cert)})
    if outcome is False:
        return Verdict(FALSE, {"kind": "refutation", "assignment": _cert_json(cert)})
    return Verdict(UNKNOWN, None, unresolved)


def _cert_json(cert: dict) -> dict:
    out = {}
    for name, (kind, payload) in cert.items():
        if kind == "point":
            out[name] = {"kind": "point", "value": str(payload)}
        elif kind == "box":
            out[name] = {"kind": "box", "lo": str(payload[0]), "hi": str(payload[1])}
        else:
            out[name] = {"kind": "any"}
    return out
