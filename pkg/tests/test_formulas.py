"""Tests for parsing, printing, prenex normalization, and exact evaluation."""

import random
from fractions import Fraction

import pytest

from devilsgames.formulas import (
    AllReals,
    And,
    Atom,
    ClosedBox,
    EXISTS,
    FORALL,
    FormulaSyntaxError,
    Implies,
    Not,
    OpenBox,
    Or,
    Polynomial,
    Quant,
    QuantifierBlock,
    Sentence,
    UndeclaredVariableError,
    eval_qf,
    parse_sentence,
    print_sentence,
    to_prenex,
)
from devilsgames.formulas.printer import sentence_from_json, sentence_to_json


class TestParser:
    def test_closed_box_sentence(self):
        s = parse_sentence("exists x in [1/2,2]. x = 1")
        assert len(s.prefix) == 1
        block = s.prefix[0]
        assert block.quantifier == EXISTS
        assert block.range == ClosedBox(Fraction(1, 2), Fraction(2))
        assert s.matrix == Atom(Polynomial.var("x") - 1, "=")

    def test_two_blocks_all_reals(self):
        s = parse_sentence("forall y. exists x. y*(x*y - 1) = 0")
        assert [b.quantifier for b in s.prefix] == [FORALL, EXISTS]
        assert all(isinstance(b.range, AllReals) for b in s.prefix)
        assert s.matrix.poly.degree() == 3

    def test_dangling_relation_is_syntax_error(self):
        with pytest.raises(FormulaSyntaxError):
            parse_sentence("exists x. x <")

    def test_undeclared_variable(self):
        with pytest.raises(UndeclaredVariableError):
            parse_sentence("exists x. x + y = 1")

    def test_malformed_rational(self):
        with pytest.raises(FormulaSyntaxError):
            parse_sentence("exists x in [1/,2]. x = 1")

    def test_open_range(self):
        s = parse_sentence("exists x in (-1,1). x = 0")
        assert s.prefix[0].range == OpenBox(Fraction(-1), Fraction(1))

    def test_no_division_in_terms(self):
        with pytest.raises(FormulaSyntaxError):
            parse_sentence("exists x. x/2 = 1")

    def test_connectives(self):
        s = parse_sentence("exists x in [0,1]. not (x = 0) implies x > 0 or x = 1")
        assert isinstance(s.matrix, Implies)


def _random_polynomial(rng, variables):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        exps = tuple(rng.randint(0, 2) for _ in variables)
        terms[exps] = rng.randint(-9, 9)
    p = Polynomial(variables, terms)
    if p.is_zero():
        p = p + 1
    return p


def _random_formula(rng, variables, depth):
    if depth == 0 or rng.random() < 0.4:
        rel = rng.choice(["=", "<", "<=", ">", ">="])
        return Atom(_random_polynomial(rng, variables), rel)
    kind = rng.choice(["and", "or", "not", "implies"])
    if kind == "and":
        return And(tuple(_random_formula(rng, variables, depth - 1) for _ in range(2)))
    if kind == "or":
        return Or(tuple(_random_formula(rng, variables, depth - 1) for _ in range(2)))
    if kind == "not":
        return Not(_random_formula(rng, variables, depth - 1))
    return Implies(
        _random_formula(rng, variables, depth - 1),
        _random_formula(rng, variables, depth - 1),
    )


def _random_sentence(rng):
    k = rng.randint(1, 4)
    variables = tuple(f"v{i}" for i in range(k))
    prefix = []
    for v in variables:
        q = rng.choice([EXISTS, FORALL])
        style = rng.random()
        if style < 0.4:
            rng_obj = AllReals()
        else:
            lo = Fraction(rng.randint(-20, 10), rng.randint(1, 8))
            hi = lo + Fraction(rng.randint(0, 30), rng.randint(1, 8))
            rng_obj = ClosedBox(lo, hi) if style < 0.8 else OpenBox(lo, hi)
        prefix.append(QuantifierBlock(q, (v,), rng_obj))
    return Sentence(tuple(prefix), _random_formula(rng, variables, 3))


class TestRoundTrip:
    def test_print_parse_identity_1000(self):
        rng = random.Random(20260810)
        for _ in range(1000):
            s = _random_sentence(rng)
            assert parse_sentence(print_sentence(s)) == s

    def test_json_round_trip(self):
        rng = random.Random(7)
        for _ in range(100):
            s = _random_sentence(rng)
            assert sentence_from_json(sentence_to_json(s)) == s


class TestPrenex:
    def test_identity_on_prenex(self):
        s = parse_sentence("forall y in [0,1]. exists x. x*y = 1")
        assert to_prenex(s) == s

    def test_pull_out_rule(self):
        s = parse_sentence("exists x. (x = 1 and exists y. y = x)")
        p = to_prenex(s)
        assert [b.quantifier for b in p.prefix] == [EXISTS, EXISTS]
        assert [b.variables for b in p.prefix] == [("x",), ("y",)]
        assert p.matrix == parse_sentence("exists x exists y. x = 1 and y = x").matrix

    def test_negation_duality(self):
        s = parse_sentence("not (forall y in [0,1]. y > 0)")
        p = to_prenex(s)
        assert [b.quantifier for b in p.prefix] == [EXISTS]
        assert p.matrix == Not(Atom(Polynomial.var("y"), ">"))

    def test_implication_premise_flips(self):
        s = parse_sentence("(forall y. y > 0) implies 1 = 1")
        p = to_prenex(s)
        assert [b.quantifier for b in p.prefix] == [EXISTS]

    def test_shadowing_renames(self):
        s = parse_sentence("forall x in [0,1]. (x > 0 and exists x. x = 2)")
        p = to_prenex(s)
        names = [v for b in p.prefix for v in b.variables]
        assert len(set(names)) == 2

    def test_matrix_quantifier_free(self):
        s = parse_sentence(
            "exists a. (forall b. a*b = 1) or (exists c. c + a = 0 and not exists d. d = c)"
        )
        p = to_prenex(s)
        from devilsgames.formulas.ast import is_quantifier_free

        assert is_quantifier_free(p.matrix)
        assert len(p.prefix) == 4


class TestEval:
    def test_square_step(self):
        m = parse_sentence("exists x0 exists x1. x1 = x0^2").matrix
        assert eval_qf(m, {"x0": Fraction(2), "x1": Fraction(4)})

    def test_exact_inverse(self):
        m = parse_sentence("exists x exists y. x*y - 1 = 0").matrix
        assert eval_qf(m, {"x": Fraction(2), "y": Fraction(1, 2)})

    def test_exact_thirds(self):
        m = parse_sentence("exists x exists y exists z. x + y = z").matrix
        assert eval_qf(m, {"x": Fraction(1, 3), "y": Fraction(1, 3), "z": Fraction(2, 3)})

    def test_missing_assignment(self):
        m = parse_sentence("exists x. x = 1").matrix
        from devilsgames.formulas import FormulaError

        with pytest.raises(FormulaError):
            eval_qf(m, {})


class TestMetadata:
    def test_tau_n_j(self):
        s = parse_sentence("forall a forall b. exists c. 5*a*b - 12*c = 0")
        assert s.tau == 4  # |-12| needs 4 bits
        assert s.n == 1
        assert s.j == 1

    def test_duplicate_binding_rejected(self):
        from devilsgames.formulas import FormulaError

        with pytest.raises(FormulaError):
            Sentence(
                (
                    QuantifierBlock(EXISTS, ("x",)),
                    QuantifierBlock(FORALL, ("x",)),
                ),
                Atom(Polynomial.var("x"), "="),
            )
