"""Parameter expressions: evaluation, unbound handling, declarations."""

from __future__ import annotations

import pytest

from mu.exprs import (
    And,
    Comparison,
    Not,
    Or,
    ParamRef,
    ParameterDef,
    ParamKind,
    Threshold,
    UnboundParameterError,
    ValueType,
    builtin_parameters,
    eval_expr,
    referenced_parameters,
)
from mu.kblang import parse_expression
from mu.levels import BeliefLevel, ThresholdMode

PARAMS = {
    "belief": BeliefLevel.SUPPORTED,
    "dangerous": True,
    "triggered": False,
    "kind": "test",
}


class TestEvaluation:
    def test_param_ref_is_boolean_coercion(self):
        assert eval_expr(ParamRef("dangerous"), PARAMS) is True
        assert eval_expr(ParamRef("triggered"), PARAMS) is False

    def test_comparison_eq_and_ne(self):
        assert eval_expr(Comparison("kind", "=", "test"), PARAMS)
        assert not eval_expr(Comparison("kind", "=", "question"), PARAMS)
        assert eval_expr(Comparison("kind", "!=", "question"), PARAMS)

    def test_threshold_over_belief(self):
        at_least = Threshold("belief", ThresholdMode.AT_LEAST, BeliefLevel.SUPPORTED)
        at_most = Threshold("belief", ThresholdMode.AT_MOST, BeliefLevel.DETRACTED)
        assert eval_expr(at_least, PARAMS)
        assert not eval_expr(at_most, PARAMS)

    def test_connectives(self):
        expr = And(
            (
                ParamRef("dangerous"),
                Or((ParamRef("triggered"), Not(ParamRef("triggered")))),
            )
        )
        assert eval_expr(expr, PARAMS)
        assert not eval_expr(Not(expr), PARAMS)

    def test_unbound_parameter_raises_with_name(self):
        with pytest.raises(UnboundParameterError) as exc_info:
            eval_expr(ParamRef("criticality"), PARAMS)
        assert exc_info.value.name == "criticality"

    def test_short_circuit_does_not_hide_unbound(self):
        # `and` with a false left side never inspects the right side.
        expr = And((ParamRef("triggered"), ParamRef("missing")))
        assert eval_expr(expr, PARAMS) is False


class TestParseUnparseRoundTrip:
    CASES = [
        "belief at-least supported",
        "belief at-most strongly-detracted",
        "dangerous",
        "not dangerous",
        "triggered and dangerous",
        "triggered or dangerous and not critical",
        "belief = supported",
        "belief != unknown",
        "(triggered or dangerous) and belief at-least detracted",
        "not (triggered and dangerous)",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_unparse_then_parse_is_identity(self, text):
        expr = parse_expression(text)
        again = parse_expression(expr.unparse())
        assert again == expr

    def test_precedence_binds_and_tighter_than_or(self):
        expr = parse_expression("a or b and c")
        assert isinstance(expr, Or)
        assert isinstance(expr.items[1], And)

    def test_referenced_parameters(self):
        expr = parse_expression("triggered and (belief at-least supported or flag)")
        assert referenced_parameters(expr) == {"triggered", "belief", "flag"}


class TestParameterDefs:
    def test_builtins_per_kind(self):
        for kind in ("finding", "cluster", "hypothesis"):
            assert "belief" in builtin_parameters(kind)
        assert "dangerous" in builtin_parameters("hypothesis")
        assert "triggered" in builtin_parameters("hypothesis")
        assert "observed" in builtin_parameters("finding")

    def test_derived_parameter_requires_expression(self):
        with pytest.raises(ValueError):
            ParameterDef(
                name="critical",
                kind=ParamKind.DERIVED,
                value_type=ValueType.BOOLEAN,
                applies_to="hypothesis",
                expression=None,
            )
