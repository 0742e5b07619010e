"""Control-parameter definitions and the boolean expression trees behind them.

A parameter is static (fixed in the knowledge base), dynamic (recomputed by
the engine after every propagation), or derived (a boolean expression over
previously defined parameters). Expressions are small trees of threshold
atoms and comparisons combined with and/or/not; evaluation is total once an
expression has been validated against a parameter vocabulary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from .levels import BeliefLevel, CostGrade, ThresholdMode, satisfies_threshold


class UnboundParameterError(LookupError):
    """An expression referenced a parameter missing from the bindings.

    Escaping to runtime means validation was skipped or the engine built
    bad bindings; knowledge-base errors are caught before evaluation.
    """

    def __init__(self, name: str):
        super().__init__(f"unbound parameter: {name!r}")
        self.name = name


# A parameter value is a boolean, an ordinal grade, or a belief level.
ParamValue = Union[bool, CostGrade, BeliefLevel]


@dataclass(frozen=True)
class ParamRef:
    """Bare reference to a boolean parameter, e.g. ``dangerous``."""

    name: str

    def unparse(self) -> str:
        return self.name


@dataclass(frozen=True)
class Comparison:
    """``param = constant`` or ``param != constant``."""

    name: str
    op: str  # "=" or "!="
    value: ParamValue

    def unparse(self) -> str:
        return f"{self.name} {self.op} {_format_value(self.value)}"


@dataclass(frozen=True)
class Threshold:
    """``param at-least LEVEL`` / ``param at-most LEVEL`` on ordered values."""

    name: str
    mode: ThresholdMode
    bound: ParamValue

    def unparse(self) -> str:
        return f"{self.name} {self.mode.value} {_format_value(self.bound)}"


@dataclass(frozen=True)
class Not:
    item: Expr

    def unparse(self) -> str:
        return f"not {_wrap(self.item)}"


@dataclass(frozen=True)
class And:
    items: tuple[Expr, ...]

    def unparse(self) -> str:
        return " and ".join(_wrap(item) for item in self.items)


@dataclass(frozen=True)
class Or:
    items: tuple[Expr, ...]

    def unparse(self) -> str:
        return " or ".join(_wrap_or_operand(item) for item in self.items)


Expr = Union[ParamRef, Comparison, Threshold, Not, And, Or]


def _format_value(value: ParamValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (BeliefLevel, CostGrade)):
        return value.label
    return str(value)


def _wrap(expr: Expr) -> str:
    if isinstance(expr, (And, Or)):
        return f"({expr.unparse()})"
    return expr.unparse()


def _wrap_or_operand(expr: Expr) -> str:
    if isinstance(expr, Or):
        return f"({expr.unparse()})"
    return _wrap(expr) if isinstance(expr, And) else expr.unparse()


def eval_expr(expr: Expr, bindings: dict[str, ParamValue]) -> bool:
    """Evaluate an expression against parameter bindings.

    Deterministic and side-effect free. Raises UnboundParameterError if a
    referenced parameter is missing, and TypeError when a comparison is
    applied to a value kind it does not fit.
    """
    if isinstance(expr, ParamRef):
        value = _lookup(expr.name, bindings)
        if not isinstance(value, bool):
            raise TypeError(
                f"parameter {expr.name!r} is not boolean; compare it explicitly"
            )
        return value
    if isinstance(expr, Comparison):
        value = _lookup(expr.name, bindings)
        equal = _values_equal(value, expr.value)
        return equal if expr.op == "=" else not equal
    if isinstance(expr, Threshold):
        value = _lookup(expr.name, bindings)
        return _threshold_holds(expr.name, value, expr.mode, expr.bound)
    if isinstance(expr, Not):
        return not eval_expr(expr.item, bindings)
    if isinstance(expr, And):
        return all(eval_expr(item, bindings) for item in expr.items)
    if isinstance(expr, Or):
        return any(eval_expr(item, bindings) for item in expr.items)
    raise TypeError(f"not an expression node: {expr!r}")


def _lookup(name: str, bindings: dict[str, ParamValue]) -> ParamValue:
    try:
        return bindings[name]
    except KeyError:
        raise UnboundParameterError(name) from None


def _values_equal(a: ParamValue, b: ParamValue) -> bool:
    # bool is an int subclass; keep grades and booleans apart.
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def _threshold_holds(
    name: str, value: ParamValue, mode: ThresholdMode, bound: ParamValue
) -> bool:
    if isinstance(value, BeliefLevel) and isinstance(bound, BeliefLevel):
        return satisfies_threshold(value, mode, bound)
    if isinstance(value, CostGrade) and isinstance(bound, CostGrade):
        if mode is ThresholdMode.AT_LEAST:
            return value >= bound
        return value <= bound
    raise TypeError(
        f"threshold on {name!r} needs an ordered value, got "
        f"{type(value).__name__} vs {type(bound).__name__}"
    )


def referenced_parameters(expr: Expr) -> set[str]:
    """Names of every parameter the expression reads."""
    if isinstance(expr, (ParamRef, Comparison, Threshold)):
        return {expr.name}
    if isinstance(expr, Not):
        return referenced_parameters(expr.item)
    if isinstance(expr, (And, Or)):
        names: set[str] = set()
        for item in expr.items:
            names |= referenced_parameters(item)
        return names
    raise TypeError(f"not an expression node: {expr!r}")


class ParamKind(enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"
    DERIVED = "derived"


class ValueType(enum.Enum):
    BOOLEAN = "boolean"
    ORDINAL = "ordinal"
    BELIEF_LEVEL = "belief-level"


@dataclass(frozen=True)
class ParameterDef:
    """Declaration of a control parameter for one node kind.

    ``expression`` is present exactly for derived parameters; derived
    definitions may reference built-ins and previously declared derived
    parameters of the same kind, never later ones.
    """

    name: str
    kind: ParamKind
    value_type: ValueType
    applies_to: str  # node kind: "finding" | "cluster" | "hypothesis"
    expression: Expr | None = None

    def __post_init__(self):
        if (self.kind is ParamKind.DERIVED) != (self.expression is not None):
            raise ValueError("derived parameters carry an expression; others do not")


def builtin_parameters(node_kind: str) -> dict[str, ValueType]:
    """Parameter vocabulary the engine itself maintains for a node kind."""
    vocab: dict[str, ValueType] = {"belief": ValueType.BELIEF_LEVEL}
    if node_kind == "finding":
        vocab["observed"] = ValueType.BOOLEAN
    if node_kind == "hypothesis":
        vocab["triggered"] = ValueType.BOOLEAN
        vocab["dangerous"] = ValueType.BOOLEAN
    return vocab
