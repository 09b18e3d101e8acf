"""Recursive-descent parser for the formula grammar.

Grammar (quantifiers may nest; the oracle and the reductions want prenex
sentences, which :func:`devilsgames.formulas.prenex.to_prenex` produces):

    sentence   := formula
    formula    := quantified | implication
    quantified := quant+ "." formula
    quant      := ("exists"|"forall") ident ("in" range)?
    range      := "[" rat "," rat "]" | "(" rat "," rat ")"
    implication:= disjunction ("implies" implication)?
    disjunction:= conjunction ("or" conjunction)*
    conjunction:= negation ("and" negation)*
    negation   := "not" negation | comparison | "(" formula ")"
    comparison := arith rel arith        rel in {=, <, <=, >, >=}
    arith      := term (("+"|"-") term)*
    term       := factor ("*" factor)*
    factor     := atom ("^" posint)?
    atom       := ident | int | "-" factor | "(" arith ")"
    rat        := "-"? int ("/" posint)?

There is no division operator; rationals appear only inside range bounds.
"""

from __future__ import annotations

from fractions import Fraction

from .ast import (
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
    Quant,
    QuantifierBlock,
    Sentence,
)


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


_KEYWORDS = {"exists", "forall", "in", "and", "or", "not", "implies"}
_PUNCT = ("<=", ">=", "=", "<", ">", "+", "-", "*", "^", "(", ")", "[", "]", ",", ".", "/")


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind, text, line, column):
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "kw" if word in _KEYWORDS else "ident"
            tokens.append(_Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(_Token("punct", p, line, col))
                col += len(p)
                i += len(p)
                break
        else:
            raise FormulaSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token helpers
    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok.text == text and tok.kind in ("punct", "kw"):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text:
            raise FormulaSyntaxError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.column)
        return self.next()

    def fail(self, message: str):
        tok = self.peek()
        raise FormulaSyntaxError(message, tok.line, tok.column)

    # -- grammar
    def parse_sentence(self) -> Sentence:
        f = self.parse_formula()
        tok = self.peek()
        if tok.kind != "eof":
            self.fail(f"unexpected trailing input {tok.text!r}")
        prefix = []
        while isinstance(f, Quant):
            prefix.append(QuantifierBlock(f.kind, f.variables, f.range))
            f = f.body
        return Sentence(tuple(prefix), f)

    def parse_formula(self) -> Formula:
        if self.peek().text in (EXISTS, FORALL):
            return self.parse_quantified()
        return self.parse_implication()

    def parse_quantified(self) -> Formula:
        quants = []
        while self.peek().text in (EXISTS, FORALL):
            kind = self.next().text
            tok = self.peek()
            if tok.kind != "ident":
                self.fail("expected variable name")
            var = self.next().text
            rng = AllReals()
            if self.accept("in"):
                rng = self.parse_range()
            quants.append((kind, var, rng))
        self.expect(".")
        body = self.parse_formula()
        for kind, var, rng in reversed(quants):
            body = Quant(kind, (var,), rng, body)
        return body

    def parse_range(self):
        if self.accept("["):
            lo = self.parse_rational()
            self.expect(",")
            hi = self.parse_rational()
            self.expect("]")
            return ClosedBox(lo, hi)
        if self.accept("("):
            lo = self.parse_rational()
            self.expect(",")
            hi = self.parse_rational()
            self.expect(")")
            return OpenBox(lo, hi)
        self.fail("expected range")

    def parse_rational(self) -> Fraction:
        neg = self.accept("-")
        tok = self.peek()
        if tok.kind != "int":
            self.fail("malformed rational")
        num = int(self.next().text)
        den = 1
        if self.accept("/"):
            tok = self.peek()
            if tok.kind != "int":
                self.fail("malformed rational")
            den = int(self.next().text)
            if den == 0:
                raise FormulaSyntaxError("zero denominator", tok.line, tok.column)
        q = Fraction(num, den)
        return -q if neg else q

    def parse_implication(self) -> Formula:
        lhs = self.parse_disjunction()
        if self.accept("implies"):
            rhs = self.parse_implication()
            return Implies(lhs, rhs)
        return lhs

    def parse_disjunction(self) -> Formula:
        parts = [self.parse_conjunction()]
        while self.accept("or"):
            parts.append(self.parse_conjunction())
        if len(parts) == 1:
            return parts[0]
        return Or(tuple(parts))

    def parse_conjunction(self) -> Formula:
        parts = [self.parse_negation()]
        while self.accept("and"):
            parts.append(self.parse_negation())
        if len(parts) == 1:
            return parts[0]
        return And(tuple(parts))

    def parse_negation(self) -> Formula:
        if self.accept("not"):
            return Not(self.parse_negation())
        if self.peek().text in (EXISTS, FORALL):
            return self.parse_quantified()
        # Either a parenthesized formula or a comparison; try comparison first.
        save = self.pos
        try:
            return self.parse_comparison()
        except FormulaSyntaxError:
            self.pos = save
        if self.accept("("):
            f = self.parse_formula()
            self.expect(")")
            return f
        self.fail("expected formula")

    def parse_comparison(self) -> Formula:
        lhs = self.parse_arith()
        tok = self.peek()
        if tok.text in ("<=", ">=", "=", "<", ">"):
            self.next()
            rhs = self.parse_arith()
            return Atom(lhs - rhs, tok.text)
        self.fail("expected relation")

    def parse_arith(self) -> Polynomial:
        p = self.parse_term()
        while True:
            if self.accept("+"):
                p = p + self.parse_term()
            elif self.accept("-"):
                p = p - self.parse_term()
            else:
                return p

    def parse_term(self) -> Polynomial:
        p = self.parse_factor()
        while self.accept("*"):
            p = p * self.parse_factor()
        return p

    def parse_factor(self) -> Polynomial:
        p = self.parse_atom()
        if self.accept("^"):
            tok = self.peek()
            if tok.kind != "int":
                self.fail("expected integer exponent")
            return p ** int(self.next().text)
        return p

    def parse_atom(self) -> Polynomial:
        tok = self.peek()
        if tok.kind == "ident":
            return Polynomial.var(self.next().text)
        if tok.kind == "int":
            return Polynomial.const(int(self.next().text))
        if self.accept("-"):
            return -self.parse_factor()
        if self.accept("("):
            p = self.parse_arith()
            self.expect(")")
            return p
        self.fail("expected variable, integer, or parenthesized expression")


def parse_sentence(text: str) -> Sentence:
    """Parse formula source into a Sentence (prefix may be empty or partial)."""
    return _Parser(text).parse_sentence()


def parse_formula(text: str) -> Formula:
    parser = _Parser(text)
    f = parser.parse_formula()
    tok = parser.peek()
    if tok.kind != "eof":
        raise FormulaSyntaxError(f"unexpected trailing input {tok.text!r}", tok.line, tok.column)
    return f
