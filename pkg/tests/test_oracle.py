"""Oracle soundness, duality, and certificate tests."""

from fractions import Fraction

import pytest

from devilsgames.formulas import (
    FALSE,
    OracleConfig,
    OracleError,
    TRUE,
    UNKNOWN,
    decide_bounded,
    eval_qf,
    parse_sentence,
)

from curated import CURATED


@pytest.mark.parametrize("name,text,expected,_alts", CURATED, ids=[c[0] for c in CURATED])
def test_curated_suite(name, text, expected, _alts):
    verdict = decide_bounded(parse_sentence(text))
    assert verdict.value == expected


@pytest.mark.parametrize("name,text,expected,_alts", CURATED, ids=[c[0] for c in CURATED])
def test_negation_duality(name, text, expected, _alts):
    verdict = decide_bounded(parse_sentence(text).negated())
    swapped = {TRUE: FALSE, FALSE: TRUE}[expected]
    assert verdict.value in (swapped, UNKNOWN)
    # the curated instances are robust enough to resolve in both polarities
    assert verdict.value == swapped


def test_unbounded_range_rejected():
    with pytest.raises(OracleError):
        decide_bounded(parse_sentence("exists x. x = 1"))


def test_nonpositive_tolerance_rejected():
    with pytest.raises(OracleError):
        OracleConfig(tolerance=Fraction(0))


def test_budget_monotonicity():
    """A bigger depth budget may only move Unknown to a decided verdict."""
    texts = [c[1] for c in CURATED]
    for text in texts:
        s = parse_sentence(text)
        small = decide_bounded(s, OracleConfig(max_depth=2, node_budget=500))
        big = decide_bounded(s, OracleConfig(max_depth=20, node_budget=400_000))
        if small.value != UNKNOWN:
            assert small.value == big.value


def test_true_certificates_satisfy_matrix():
    for name, text, expected, _ in CURATED:
        if expected != TRUE:
            continue
        s = parse_sentence(text)
        verdict = decide_bounded(s)
        assert verdict.value == TRUE
        cert = verdict.certificate["assignment"]
        assignment = {
            var: Fraction(entry["value"])
            for var, entry in cert.items()
            if entry["kind"] == "point"
        }
        # a fully-pointed witness must satisfy the matrix exactly
        bound = [v for b in s.prefix for v in b.variables]
        if all(v in assignment for v in bound):
            assert eval_qf(s.matrix, assignment)


def test_forced_witness_is_exact():
    v = decide_bounded(parse_sentence("exists x in [1/2,2]. x = 1"))
    assert v.value == TRUE
    assert v.certificate["assignment"]["x"] == {"kind": "point", "value": "1"}


def test_empty_open_range():
    assert decide_bounded(parse_sentence("exists x in (1,1). x = 1")).value == FALSE
    assert decide_bounded(parse_sentence("forall x in (1,1). x = 2")).value == TRUE


def test_unknown_carries_unresolved_regions():
    # equality tied to a universally quantified variable cannot be certified
    s = parse_sentence("forall y in [3/4,1]. exists x in [1/2,2]. x + y = 2")
    v = decide_bounded(s, OracleConfig(max_depth=6, node_budget=4000))
    assert v.value == UNKNOWN
    assert len(v.unresolved) > 0
