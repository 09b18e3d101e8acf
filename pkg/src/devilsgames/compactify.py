"""Closed-constraint conversion, compactification, and symbolic bound formulas.

The transform stack replaces unbounded quantifiers with scaled boxed
quantifiers plus squeeze constraints, truth-preserving in the limit; the
astronomically large exponents and limit bounds are kept as TowerInt trees
and never expanded into polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Dict, List, Optional, Tuple

from .formulas.ast import (
    AllReals,
    And,
    Atom,
    ClosedBox,
    EXISTS,
    FORALL,
    Formula,
    FormulaError,
    Implies,
    Not,
    OpenBox,
    Or,
    Polynomial,
    QuantifierBlock,
    Sentence,
    conj,
    formula_variables,
    is_quantifier_free,
)
from .formulas.evaluate import nnf
from .towers import ALPHA, BETA, GREATER, EQUAL, TowerInt


class CompactifyError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Closed constraints (single degree-<=4 equation)


class _CloseBuilder:
    def __init__(self, taken):
        self.taken = set(taken)
        self.counter = count(1)
        self.aux: List[str] = []
        self.chain: List[Tuple[str, Polynomial]] = []  # var = expr, in order
        self.free_aux: List[str] = []  # sqrt-style witnesses, not functional
        self.product_cache: Dict[tuple, str] = {}

    def fresh(self, base: str) -> str:
        while True:
            name = f"{base}_{next(self.counter)}"
            if name not in self.taken:
                self.taken.add(name)
                self.aux.append(name)
                return name

    @property
    def definings(self) -> List[Polynomial]:
        return [Polynomial.var(v) - expr for v, expr in self.chain]

    def define(self, expr: Polynomial, base: str) -> Polynomial:
        """Fresh variable v with defining equation v - expr = 0 (degree <= 2)."""
        if expr.degree() > 2:
            raise CompactifyError("defining equation would exceed degree 2")
        v = self.fresh(base)
        self.chain.append((v, expr))
        return Polynomial.var(v)

    def product_var(self, a: str, b: str) -> str:
        key = tuple(sorted((a, b)))
        if key not in self.product_cache:
            v = self.fresh("m")
            self.chain.append((v, Polynomial.var(a) * Polynomial.var(b)))
            self.product_cache[key] = v
        return self.product_cache[key]

    def flatten(self, p: Polynomial) -> Polynomial:
        """Equal polynomial of degree <= 2 over original plus product variables."""
        out = Polynomial.const(0)
        for exps, coeff in p.terms.items():
            factors: List[str] = []
            for v, e in zip(p.variables, exps):
                factors.extend([v] * e)
            while len(factors) > 2:
                a = factors.pop()
                b = factors.pop()
                factors.append(self.product_var(a, b))
            term = Polynomial.const(coeff)
            for v in factors:
                term = term * Polynomial.var(v)
            out = out + term
        return out

    def atom_zero_form(self, atom: Atom) -> Polynomial:
        """Expression E (degree <= 2) with: exists aux making E = 0 iff atom.

        For every value of the original variables some aux assignment makes
        every defining equation hold, whatever value E then takes.
        """
        p = self.flatten(atom.poly)
        if atom.rel == "=":
            return p
        w = self.fresh("w")
        self.free_aux.append(w)
        wv = Polynomial.var(w)
        if atom.rel == ">=":
            return p - wv * wv
        if atom.rel == "<=":
            return p + wv * wv
        # strict: p > 0  <=>  exists w: p*w^2 = 1
        pv = p if len(p.terms) == 1 and p.degree() <= 1 else self.define(p, "v")
        a = self.define(pv * wv, "v")
        if atom.rel == ">":
            return a * wv - 1
        return a * wv + 1  # p < 0  <=>  p*w^2 = -1

    def combine(self, f: Formula) -> Polynomial:
        """Zero-form of an NNF formula, materialized to degree <= 1."""
        if isinstance(f, Atom):
            expr = self.atom_zero_form(f)
            if expr.degree() <= 1:
                return expr
            return self.define(expr, "u")
        ops = [self.combine(c) for c in f.children]
        if isinstance(f, And):
            acc = ops[0]
            for op in ops[1:]:
                acc = self.define(acc * acc + op * op, "c")
            return acc
        if isinstance(f, Or):
            acc = ops[0]
            for op in ops[1:]:
                acc = self.define(acc * op, "c")
            return acc
        raise CompactifyError(f"not an NNF formula: {f!r}")


@dataclass(frozen=True)
class ClosureResult:
    """f plus the functional defining chain behind its auxiliary variables.

    `chain` entries (v, expr) pin v = expr(earlier variables); `free_aux`
    variables are square-root style witnesses whose value depends on the atom
    being satisfied (they may be irrational).
    """

    f: Polynomial
    aux: tuple
    chain: tuple
    free_aux: tuple
    root: Polynomial


def close_constraints_detailed(m: Formula) -> ClosureResult:
    if not is_quantifier_free(m):
        raise CompactifyError("close_constraints expects a quantifier-free formula")
    normal = nnf(m)
    taken = formula_variables(m)

    # showcase shortcuts: a single closed atom, or a two-equality conjunction
    if isinstance(normal, Atom) and normal.rel == "=" and normal.poly.degree() <= 2:
        f = normal.poly * normal.poly
        return ClosureResult(f, (), (), (), normal.poly)
    if (
        isinstance(normal, And)
        and len(normal.children) == 2
        and all(
            isinstance(c, Atom) and c.rel == "=" and c.poly.degree() <= 2
            for c in normal.children
        )
    ):
        g1, g2 = (c.poly for c in normal.children)
        return ClosureResult(g1 * g1 + g2 * g2, (), (), (), g1 * g1 + g2 * g2)

    builder = _CloseBuilder(taken)
    root = builder.combine(normal)
    f = root * root
    for d in builder.definings:
        f = f + d * d
    if f.degree() > 4:
        raise CompactifyError(f"internal: degree {f.degree()} > 4")
    return ClosureResult(
        f, tuple(builder.aux), tuple(builder.chain), tuple(builder.free_aux), root
    )


def close_constraints(m: Formula) -> Tuple[Polynomial, List[str]]:
    """Single polynomial f of degree <= 4 with (exists aux: f = 0) iff m."""
    result = close_constraints_detailed(m)
    return result.f, list(result.aux)


# ---------------------------------------------------------------------------
# Compactification skeleton


@dataclass(frozen=True)
class ScaledBox:
    """[-base, base]^(n+1) * (1 + |factor_vars|^2)^exponent, open or closed.

    `base` is either the name of an outer scale variable or a TowerInt limit
    bound.  Stored structurally; never expanded into polynomials.
    """

    base_var: Optional[str]
    base_limit: Optional[TowerInt]
    factor_vars: tuple
    exponent: Optional[TowerInt]
    open: bool = False


@dataclass(frozen=True)
class SqueezeConstraint:
    """a * |z - y|^2 <= (1 + |cap_vars|^2)^(-exponent)  and  |z - y|^2 <= 1."""

    scale_var: str
    z_vars: tuple
    y_vars: tuple
    cap_vars: tuple
    exponent: TowerInt


@dataclass(frozen=True)
class CompactBlock:
    quantifier: str
    main_vars: tuple  # x_l or y_l components
    scale_var: str  # b_l or a_l
    z_vars: tuple  # existential blocks only
    range: ScaledBox


@dataclass(frozen=True)
class CompactSentence:
    blocks: tuple
    squeezes: tuple
    matrix: Formula
    a_limit: TowerInt
    b_limit: TowerInt
    p: tuple  # p_1..p_k
    q: tuple  # q_1..q_k
    k: int
    n: int
    fully_closed: bool
    leading_exists: bool


def squeeze_p(ell: int, n: int, alpha: TowerInt = ALPHA) -> TowerInt:
    """p_l = 4^((6*alpha*n)^(l*(2l-1)))."""
    base = TowerInt.lit(6) * alpha * TowerInt.lit(n)
    return TowerInt.lit(4) ** (base ** TowerInt.lit(ell * (2 * ell - 1)))


def squeeze_q(ell: int, n: int, alpha: TowerInt = ALPHA) -> TowerInt:
    """q_l = 4^((6*alpha*n)^(l*(2l+1)))."""
    base = TowerInt.lit(6) * alpha * TowerInt.lit(n)
    return TowerInt.lit(4) ** (base ** TowerInt.lit(ell * (2 * ell + 1)))


def limit_bounds(tau: int, n: int, k: int, alpha: TowerInt = ALPHA, beta: TowerInt = BETA):
    """The realized values closing the two leading limits.

    b_limit = exp2(tau * 4^((6 alpha n)^(k(2k+1)) * (beta (n+4))^(k+4)))
    a_limit = exp2(tau * 4^((6 alpha n)^(k(2k+1)) * (2 (beta (n+4))^(k+4) + 1)))
    """
    if k == 0:
        one = TowerInt.lit(1)
        return one, one
    t = TowerInt.lit(max(tau, 1))
    shared = (TowerInt.lit(6) * alpha * TowerInt.lit(n)) ** TowerInt.lit(k * (2 * k + 1))
    inner = (beta * TowerInt.lit(n + 4)) ** TowerInt.lit(k + 4)
    b_limit = TowerInt.exp2(t * (TowerInt.lit(4) ** (shared * inner)))
    a_limit = TowerInt.exp2(
        t * (TowerInt.lit(4) ** (shared * (TowerInt.lit(2) * inner + TowerInt.lit(1))))
    )
    return a_limit, b_limit


def coalesce_blocks(prefix) -> tuple:
    """Merge adjacent same-quantifier AllReals blocks into one wide block."""
    merged: List[QuantifierBlock] = []
    for b in prefix:
        if (
            merged
            and merged[-1].quantifier == b.quantifier
            and isinstance(merged[-1].range, AllReals)
            and isinstance(b.range, AllReals)
        ):
            merged[-1] = QuantifierBlock(
                b.quantifier, merged[-1].variables + b.variables, AllReals()
            )
        else:
            merged.append(b)
    return tuple(merged)


def _check_source_form(s: Sentence) -> Tuple[int, int, bool, tuple]:
    """Validate the source shape; returns (k, n, leading_exists, blocks)."""
    if not is_quantifier_free(s.matrix):
        raise CompactifyError("matrix must be quantifier-free (prenex first)")
    if not isinstance(s.matrix, Atom) or s.matrix.rel != "=":
        raise CompactifyError("matrix must be a single equation f = 0")
    if s.matrix.poly.degree() > 4:
        raise CompactifyError("matrix degree exceeds 4; run close_constraints first")
    if not s.prefix:
        return 0, 1, False, ()
    for b in s.prefix:
        if not isinstance(b.range, AllReals):
            raise CompactifyError("compactification applies to unbounded quantifiers")
    blocks = coalesce_blocks(s.prefix)
    if blocks[-1].quantifier != EXISTS:
        raise CompactifyError(
            "unsupported: innermost quantifier is universal (the transform "
            "requires an existential innermost block)"
        )
    widths = {len(b.variables) for b in blocks}
    if len(widths) != 1:
        raise CompactifyError("all blocks must share one width n")
    n = widths.pop()
    leading_exists = blocks[0].quantifier == EXISTS
    k = len(blocks) // 2
    return k, n, leading_exists, blocks


def compactify_sentence(
    s: Sentence, alpha: TowerInt = ALPHA, beta: TowerInt = BETA, fully_closed: bool = False
) -> CompactSentence:
    """Apply the compactification template to an alternating f=0 sentence."""
    k, n, leading_exists, source_blocks = _check_source_form(s)
    tau = max(s.tau, 1)
    # a lone leading existential still needs a realized b-limit
    limit_k = max(k, 1) if (k > 0 or leading_exists) else 0
    a_limit, b_limit = limit_bounds(tau, n, limit_k, alpha, beta)
    p = tuple(squeeze_p(ell, n, alpha) for ell in range(1, k + 1))
    q = tuple(squeeze_q(ell, n, alpha) for ell in range(1, k + 1))

    if k == 0 and not leading_exists:
        return CompactSentence(
            (), (), s.matrix, a_limit, b_limit, p, q, 0, n, fully_closed, False
        )

    blocks = list(source_blocks)
    out_blocks: List[CompactBlock] = []
    squeezes: List[SqueezeConstraint] = []
    subst: Dict[str, Polynomial] = {}

    lead_block = None
    if leading_exists:
        lead = blocks[0]
        blocks = blocks[1:]
        lead_block = CompactBlock(
            EXISTS,
            tuple(lead.variables),
            f"b{k + 1}",
            (),
            ScaledBox(None, b_limit, (), None, False),
        )

    # remaining blocks pair up as (forall y_l, exists x_l), outermost l = k
    pairs = []
    for idx in range(0, len(blocks), 2):
        pairs.append((blocks[idx], blocks[idx + 1]))
    if len(pairs) != k:
        raise CompactifyError("prefix does not pair into forall/exists blocks")

    for offset, (uni, exi) in enumerate(pairs):
        ell = k - offset
        a_name, b_name = f"a{ell}", f"b{ell}"
        if offset == 0:
            uni_range = ScaledBox(None, a_limit, (), None, fully_closed)
        else:
            outer_exi = pairs[offset - 1][1]
            uni_range = ScaledBox(
                f"a{ell + 1}",
                None,
                tuple(outer_exi.variables) + (f"b{ell + 1}",),
                p[ell],  # p_(l+1): p is 0-indexed by l-1
                fully_closed,
            )
        out_blocks.append(
            CompactBlock(FORALL, tuple(uni.variables), a_name, (), uni_range)
        )
        factor = tuple(uni.variables) + (a_name,)
        if offset == 0 and not leading_exists:
            exi_range = ScaledBox(None, b_limit, factor, q[ell - 1], False)
        else:
            exi_range = ScaledBox(f"b{ell + 1}", None, factor, q[ell - 1], False)
        z_vars = tuple(f"z{ell}_{i}" for i in range(1, n + 1))
        out_blocks.append(
            CompactBlock(EXISTS, tuple(exi.variables), b_name, z_vars, exi_range)
        )
        squeezes.append(
            SqueezeConstraint(
                a_name,
                z_vars,
                tuple(uni.variables),
                tuple(exi.variables) + (b_name,),
                p[ell - 1],
            )
        )
        for y_var, z_var in zip(uni.variables, z_vars):
            subst[y_var] = Polynomial.var(z_var)

    matrix = Atom(s.matrix.poly.substitute(subst), "=")
    if lead_block is not None:
        out_blocks.insert(0, lead_block)
    return CompactSentence(
        tuple(out_blocks),
        tuple(squeezes),
        matrix,
        a_limit,
        b_limit,
        p,
        q,
        k,
        n,
        fully_closed,
        leading_exists,
    )


def fully_closed_compactify(
    s: Sentence, alpha: TowerInt = ALPHA, beta: TowerInt = BETA
) -> CompactSentence:
    """Compactification with every universal box open."""
    return compactify_sentence(s, alpha, beta, fully_closed=True)


# ---------------------------------------------------------------------------
# Structural conformance validator


def validate_compactification(cs: CompactSentence, original: Sentence) -> List[str]:
    """Check the output against the template; returns a list of violations."""
    issues: List[str] = []
    k, n = cs.k, cs.n

    expected_p = tuple(squeeze_p(ell, n) for ell in range(1, k + 1))
    expected_q = tuple(squeeze_q(ell, n) for ell in range(1, k + 1))
    if cs.p != expected_p:
        issues.append("p_l sequence does not match 4^((6 alpha n)^(l(2l-1)))")
    if cs.q != expected_q:
        issues.append("q_l sequence does not match 4^((6 alpha n)^(l(2l+1)))")

    pair_blocks = [b for b in cs.blocks if not (cs.leading_exists and b is cs.blocks[0])]
    if len(pair_blocks) != 2 * k:
        issues.append(f"expected {2 * k} paired blocks, found {len(pair_blocks)}")
        return issues

    for offset in range(k):
        ell = k - offset
        uni = pair_blocks[2 * offset]
        exi = pair_blocks[2 * offset + 1]
        if uni.quantifier != FORALL or exi.quantifier != EXISTS:
            issues.append(f"level {ell}: quantifier pair out of order")
            continue
        if len(uni.main_vars) != n:
            issues.append(f"level {ell}: y arity {len(uni.main_vars)} != n")
        if len(exi.main_vars) != n:
            issues.append(f"level {ell}: x arity {len(exi.main_vars)} != n")
        if len(exi.z_vars) != n:
            issues.append(f"level {ell}: z arity {len(exi.z_vars)} != n")
        if uni.range.open != cs.fully_closed:
            issues.append(f"level {ell}: universal box openness flag mismatch")
        if exi.range.open:
            issues.append(f"level {ell}: existential box must be closed")
        if offset == 0:
            if uni.range.base_limit != cs.a_limit or uni.range.exponent is not None:
                issues.append("outermost universal box must be the bare a-limit box")
        else:
            if uni.range.base_var != f"a{ell + 1}":
                issues.append(f"level {ell}: universal base is not a{ell + 1}")
            if uni.range.exponent != squeeze_p(ell + 1, n):
                issues.append(f"level {ell}: universal scaling exponent is not p_{ell + 1}")
            outer = pair_blocks[2 * (offset - 1) + 1]
            if set(uni.range.factor_vars) != set(outer.main_vars) | {outer.scale_var}:
                issues.append(f"level {ell}: universal scaling factor variables wrong")
        if exi.range.exponent != squeeze_q(ell, n):
            issues.append(f"level {ell}: existential scaling exponent is not q_{ell}")
        if set(exi.range.factor_vars) != set(uni.main_vars) | {uni.scale_var}:
            issues.append(f"level {ell}: existential scaling factor variables wrong")
        sq = next((sq for sq in cs.squeezes if sq.scale_var == uni.scale_var), None)
        if sq is None:
            issues.append(f"level {ell}: missing squeeze constraint for {uni.scale_var}")
        else:
            if sq.exponent != squeeze_p(ell, n):
                issues.append(f"level {ell}: squeeze exponent is not p_{ell}")
            if set(sq.cap_vars) != set(exi.main_vars) | {exi.scale_var}:
                issues.append(f"level {ell}: squeeze cap variables wrong")
            if sq.z_vars != exi.z_vars or sq.y_vars != uni.main_vars:
                issues.append(f"level {ell}: squeeze z/y variables wrong")

    # matrix must be f with each y replaced by the level's z
    subst = {}
    for offset in range(k):
        uni = pair_blocks[2 * offset]
        exi = pair_blocks[2 * offset + 1]
        for y, z in zip(uni.main_vars, exi.z_vars):
            subst[y] = Polynomial.var(z)
    if isinstance(original.matrix, Atom):
        expected_matrix = original.matrix.poly.substitute(subst)
        if cs.matrix.poly != expected_matrix:
            issues.append("matrix is not f(x, z) = 0")
    auxiliary = [b.scale_var for b in cs.blocks] + [z for b in cs.blocks for z in b.z_vars]
    if len(set(auxiliary)) != len(auxiliary):
        issues.append("auxiliary variables are not unique")
    return issues


# ---------------------------------------------------------------------------
# Limit realization and variable caps


def realize_limit_bounds(
    tau: TowerInt, d: TowerInt, n: int, j: int, k: int, r: int, beta: TowerInt = BETA
) -> List[TowerInt]:
    """y_i = exp2(tau * d^(i*(beta*(n+r))^(j+r) + i - 1)) for i = 1..k."""
    if r < 2 * k:
        raise CompactifyError(f"limit realization requires r >= 2k (r={r}, k={k})")
    if n < 0 or j < 0 or k < 0:
        raise CompactifyError("inputs must be nonnegative")
    base = beta * TowerInt.lit(n + r)
    out = []
    for i in range(1, k + 1):
        exponent = base ** TowerInt.lit(j + r)
        power = TowerInt.lit(i) * exponent + TowerInt.lit(i - 1)
        out.append(TowerInt.exp2(tau * (d ** power)))
    return out


@dataclass(frozen=True)
class VariableCaps:
    Lambda: TowerInt
    R: TowerInt
    A: tuple  # A_1..A_k (A[i-1] = A_i)
    B: tuple
    p_cap: TowerInt
    q_cap: TowerInt


def compute_variable_caps(tau: int, n: int, k: int, beta: TowerInt = BETA) -> VariableCaps:
    """Single caps for all quantified variables of the converted formula.

    A_(k-i) = exp2(4^((tau+6i)   (6 beta n)^(6k^2)))
    B_(k-i) = exp2(4^((tau+3+6i) (6 beta n)^(6k^2)))
    Lambda  = exp2(4^((tau+6k+3) (6 beta n)^(6k^2)))
    R       = 2 (tau+6k+3) (6 beta n)^(6k^2)
    """
    if k < 1 or n < 1 or tau < 1:
        raise CompactifyError("caps need k >= 1, n >= 1, tau >= 1")
    X = (TowerInt.lit(6) * beta * TowerInt.lit(n)) ** TowerInt.lit(6 * k * k)
    four = TowerInt.lit(4)
    A = [None] * k
    B = [None] * k
    for i in range(k):
        A[k - i - 1] = TowerInt.exp2(four ** (TowerInt.lit(tau + 6 * i) * X))
        B[k - i - 1] = TowerInt.exp2(four ** (TowerInt.lit(tau + 3 + 6 * i) * X))
    lam = TowerInt.exp2(four ** (TowerInt.lit(tau + 6 * k + 3) * X))
    R = TowerInt.lit(2) * TowerInt.lit(tau + 6 * k + 3) * X
    cap = four ** X
    return VariableCaps(lam, R, tuple(A), tuple(B), cap, cap)


def check_cap_recurrences(caps: VariableCaps, n: int, k: int) -> List[str]:
    """Verify the choice inequalities under TowerInt comparison."""
    issues = []
    for ell in range(1, k):  # A_l vs A_(l+1), indices 1-based
        A_l, A_next = caps.A[ell - 1], caps.A[ell]
        B_l, B_next = caps.B[ell - 1], caps.B[ell]
        growth_a = (
            TowerInt.lit(1) + TowerInt.lit(n + 1) * B_next * B_next
        ) ** caps.p_cap
        if A_l.compare(A_next * growth_a) not in (GREATER, EQUAL):
            issues.append(f"A_{ell} >= A_{ell + 1} (1+(n+1)B_{ell + 1}^2)^p fails")
        growth_b = (TowerInt.lit(1) + TowerInt.lit(n + 1) * A_l * A_l) ** caps.q_cap
        if B_l.compare(B_next * growth_b) not in (GREATER, EQUAL):
            issues.append(f"B_{ell} >= B_{ell + 1} (1+(n+1)A_{ell}^2)^q fails")
    for i, a in enumerate(caps.A, start=1):
        if caps.Lambda.compare(a) != GREATER:
            issues.append(f"Lambda does not dominate A_{i}")
    for i, b in enumerate(caps.B, start=1):
        if caps.Lambda.compare(b) != GREATER:
            issues.append(f"Lambda does not dominate B_{i}")
    return issues
