"""Evidence-gathering actions and the declarative control strategy block.

Every action produces evidence (its yielded findings) and may require
evidence before it is legal (belief preconditions on nodes). Treatments are
ordinary actions whose evidential effect flows through a yielded finding,
so they need no special machinery.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .exprs import Expr
from .levels import COST_DIMENSIONS, CostVector


class ActionKind(enum.Enum):
    QUESTION = "question"
    TEST = "test"
    TREATMENT = "treatment"

    @classmethod
    def from_label(cls, label: str) -> ActionKind:
        for kind in cls:
            if kind.value == label:
                return kind
        raise ValueError(f"not an action kind: {label!r}")


@dataclass(frozen=True)
class Precondition:
    """A node-scoped expression that must hold before the action is legal."""

    node: str
    expression: Expr

    def unparse(self) -> str:
        return f"{self.node} {self.expression.unparse()}"


@dataclass(frozen=True)
class ActionSpec:
    id: str
    kind: ActionKind
    cost: CostVector
    yields: tuple[str, ...]
    preconditions: tuple[Precondition, ...] = ()
    repeatable: bool = False

    def __post_init__(self):
        if not self.yields:
            raise ValueError(f"action {self.id!r} yields no findings")


@dataclass(frozen=True)
class Strategy:
    """Named control-strategy configuration declared in the knowledge base.

    ``cost_priority`` orders the cost dimensions for lexicographic
    comparison; ``presenting`` lists the intake findings recorded at the
    start of a batch workup (the complaint that opens the case).
    """

    name: str = "default"
    cost_priority: tuple[str, ...] = ("risk", "monetary", "discomfort")
    presenting: tuple[str, ...] = ()

    def __post_init__(self):
        if sorted(self.cost_priority) != sorted(COST_DIMENSIONS):
            raise ValueError(
                f"cost-priority must order {COST_DIMENSIONS} exactly, "
                f"got {self.cost_priority}"
            )


DEFAULT_STRATEGY = Strategy()
