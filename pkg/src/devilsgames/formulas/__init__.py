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
    UndeclaredVariableError,
)
from .evaluate import eval_qf, nnf
from .oracle import FALSE, OracleConfig, OracleError, TRUE, UNKNOWN, Verdict, decide_bounded
from .parser import FormulaSyntaxError, parse_formula, parse_sentence
from .prenex import to_prenex
from .printer import print_formula, print_sentence, sentence_from_json, sentence_to_json
