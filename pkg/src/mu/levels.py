"""Belief lattice, evidence roles, and the qualitative cost scale.

Beliefs are one of seven totally ordered symbolic values rather than
numbers; costs are three independent ordinal dimensions that are never
collapsed into a single figure. Everything here is immutable and safe to
share across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class BeliefLevel(enum.IntEnum):
    """Seven discrete levels of belief, ordered from ruled-out to certain.

    The integer value is the level's rank; the mapping is a bijection onto
    [-3, +3] symmetric around ``UNKNOWN``.
    """

    DISCONFIRMED = -3
    STRONGLY_DETRACTED = -2
    DETRACTED = -1
    UNKNOWN = 0
    SUPPORTED = 1
    STRONGLY_SUPPORTED = 2
    CONFIRMED = 3

    @property
    def rank(self) -> int:
        return int(self)

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def from_label(cls, label: str) -> BeliefLevel:
        try:
            return cls[label.strip().upper().replace("-", "_")]
        except KeyError:
            raise ValueError(f"not a belief level: {label!r}") from None

    def __str__(self) -> str:
        return self.label


#: All seven levels in ascending rank order.
ALL_LEVELS: tuple[BeliefLevel, ...] = tuple(sorted(BeliefLevel))


class Ordering(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


def compare_levels(a: BeliefLevel, b: BeliefLevel) -> Ordering:
    """Total order on belief levels, consistent with the rank bijection."""
    if a.rank < b.rank:
        return Ordering.LESS
    if a.rank > b.rank:
        return Ordering.GREATER
    return Ordering.EQUAL


class ThresholdMode(enum.Enum):
    AT_LEAST = "at-least"
    AT_MOST = "at-most"

    @classmethod
    def from_label(cls, label: str) -> ThresholdMode:
        for mode in cls:
            if mode.value == label:
                return mode
        raise ValueError(f"not a threshold mode: {label!r}")


def satisfies_threshold(
    level: BeliefLevel, mode: ThresholdMode, bound: BeliefLevel
) -> bool:
    """True iff ``level`` clears ``bound`` in the given direction."""
    if mode is ThresholdMode.AT_LEAST:
        return level.rank >= bound.rank
    return level.rank <= bound.rank


class EvidenceRole(enum.Enum):
    """What a source of evidence can do to the belief in its target."""

    POTENTIALLY_SUPPORTING = "potentially-supporting"
    POTENTIALLY_DETRACTING = "potentially-detracting"
    POTENTIALLY_CONFIRMING = "potentially-confirming"
    POTENTIALLY_DISCONFIRMING = "potentially-disconfirming"

    @property
    def label(self) -> str:
        return self.value

    @property
    def sign(self) -> int:
        """+1 for roles that can push belief up, -1 for roles pushing down."""
        if self in (EvidenceRole.POTENTIALLY_SUPPORTING, EvidenceRole.POTENTIALLY_CONFIRMING):
            return 1
        return -1

    @classmethod
    def from_label(cls, label: str) -> EvidenceRole:
        for role in cls:
            if role.value == label:
                return role
        raise ValueError(f"not an evidence role: {label!r}")


#: Roles through which evidence can raise the target's belief.
UPWARD_ROLES = frozenset(
    {EvidenceRole.POTENTIALLY_SUPPORTING, EvidenceRole.POTENTIALLY_CONFIRMING}
)
#: Roles through which evidence can lower the target's belief.
DOWNWARD_ROLES = frozenset(
    {EvidenceRole.POTENTIALLY_DETRACTING, EvidenceRole.POTENTIALLY_DISCONFIRMING}
)


class CostGrade(enum.IntEnum):
    """Ordinal cost scale; comparisons only, no arithmetic."""

    FREE = 0
    LOW = 1
    MODERATE = 2
    HIGH = 3
    VERY_HIGH = 4

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def from_label(cls, label: str) -> CostGrade:
        try:
            return cls[label.strip().upper().replace("-", "_")]
        except KeyError:
            raise ValueError(f"not a cost grade: {label!r}") from None

    def __str__(self) -> str:
        return self.label


#: Cost dimension names in canonical declaration order.
COST_DIMENSIONS: tuple[str, ...] = ("monetary", "risk", "discomfort")


@dataclass(frozen=True)
class CostVector:
    """Three-dimensional ordinal cost of an action.

    The dimensions are deliberately kept separate; callers compare
    per-dimension (``fits_within``) or lexicographically under an explicit
    dimension priority (``sort_key``), never by a combined score.
    """

    monetary: CostGrade = CostGrade.FREE
    risk: CostGrade = CostGrade.FREE
    discomfort: CostGrade = CostGrade.FREE

    def dimension(self, name: str) -> CostGrade:
        if name not in COST_DIMENSIONS:
            raise KeyError(f"unknown cost dimension: {name!r}")
        return getattr(self, name)

    def fits_within(self, ceiling: CostVector) -> bool:
        """True iff every dimension is at or below the ceiling's."""
        return (
            self.monetary <= ceiling.monetary
            and self.risk <= ceiling.risk
            and self.discomfort <= ceiling.discomfort
        )

    def sort_key(self, priority: tuple[str, ...]) -> tuple[int, ...]:
        """Lexicographic comparison key under a dimension priority order."""
        return tuple(int(self.dimension(name)) for name in priority)

    def max_with(self, other: CostVector) -> CostVector:
        """Per-dimension maximum (the cost of doing both things)."""
        return CostVector(
            monetary=max(self.monetary, other.monetary),
            risk=max(self.risk, other.risk),
            discomfort=max(self.discomfort, other.discomfort),
        )

    def to_dict(self) -> dict[str, str]:
        return {name: self.dimension(name).label for name in COST_DIMENSIONS}

    @classmethod
    def from_dict(cls, data: dict[str, str]) -> CostVector:
        unknown = set(data) - set(COST_DIMENSIONS)
        if unknown:
            raise ValueError(f"unknown cost dimensions: {sorted(unknown)}")
        return cls(
            **{name: CostGrade.from_label(value) for name, value in data.items()}
        )


#: Ceiling that admits every cost.
UNBOUNDED_COST = CostVector(CostGrade.VERY_HIGH, CostGrade.VERY_HIGH, CostGrade.VERY_HIGH)
