"""mu: a qualitative engine for managing uncertainty in consultations.

Belief in a hypothesis is one of seven ordered levels, moved by evidence
through an inference network, and every control decision — what to focus
on, what to ask or test next, when to stop — is taken by comparing those
levels and ordinal costs, never by multiplying numbers. The package bundles
a chest-pain knowledge base, a query engine over the control state, a
workup planner, and an event-sourced consultation service.
"""

from __future__ import annotations

from .actions import ActionKind, ActionSpec, Precondition, Strategy
from .bundled import BUNDLED_NAMES, bundled_kb, bundled_network, bundled_text
from .kblang import (
    Diagnostic,
    KbParseError,
    KnowledgeBase,
    load_kb,
    parse_expression,
    parse_kb,
    serialize_kb,
)
from .levels import (
    ALL_LEVELS,
    COST_DIMENSIONS,
    UNBOUNDED_COST,
    BeliefLevel,
    CostGrade,
    CostVector,
    EvidenceRole,
    Ordering,
    ThresholdMode,
    compare_levels,
    satisfies_threshold,
)
from .network import (
    BeliefAtom,
    CombiningRule,
    EvidenceLink,
    InconsistentEvidenceError,
    Network,
    NetworkValidationError,
    NodeKind,
    NodeSpec,
    OutOfDomainError,
    PropagationResult,
    UnknownFindingError,
    UnknownNodeError,
    ValueAtom,
    ValueDomain,
    Violation,
    evaluate_combining,
    propagate,
    validate_network,
)
from .planner import (
    EmptyCandidatesError,
    FocusChoice,
    ObservationOutsideYieldsError,
    PatientModel,
    SessionTrace,
    TraceEntry,
    candidate_actions,
    choose_action,
    record_outcome,
    run_workup,
    select_focus,
)
from .queries import (
    ChangePlan,
    InvalidQueryError,
    NodePredicate,
    StateSpaceTooLargeError,
    UnknownParameterError,
    completion_count,
    oracle_enumerate,
    query_change,
    query_discriminate,
    query_effect,
    query_focus,
    query_state,
)
from .session import (
    Session,
    SessionEvent,
    SessionStore,
    execute_query,
    export_trace,
    get_recommendation,
    record_finding,
    run_query,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_LEVELS",
    "BUNDLED_NAMES",
    "COST_DIMENSIONS",
    "UNBOUNDED_COST",
    "ActionKind",
    "ActionSpec",
    "BeliefAtom",
    "BeliefLevel",
    "ChangePlan",
    "CombiningRule",
    "CostGrade",
    "CostVector",
    "Diagnostic",
    "EmptyCandidatesError",
    "EvidenceLink",
    "EvidenceRole",
    "FocusChoice",
    "InconsistentEvidenceError",
    "InvalidQueryError",
    "KbParseError",
    "KnowledgeBase",
    "Network",
    "NetworkValidationError",
    "NodeKind",
    "NodePredicate",
    "NodeSpec",
    "ObservationOutsideYieldsError",
    "Ordering",
    "OutOfDomainError",
    "PatientModel",
    "Precondition",
    "PropagationResult",
    "Session",
    "SessionEvent",
    "SessionStore",
    "SessionTrace",
    "StateSpaceTooLargeError",
    "Strategy",
    "ThresholdMode",
    "TraceEntry",
    "UnknownFindingError",
    "UnknownNodeError",
    "UnknownParameterError",
    "ValueAtom",
    "ValueDomain",
    "Violation",
    "bundled_kb",
    "bundled_network",
    "bundled_text",
    "candidate_actions",
    "choose_action",
    "compare_levels",
    "completion_count",
    "evaluate_combining",
    "execute_query",
    "export_trace",
    "get_recommendation",
    "load_kb",
    "oracle_enumerate",
    "parse_expression",
    "parse_kb",
    "propagate",
    "query_change",
    "query_discriminate",
    "query_effect",
    "query_focus",
    "query_state",
    "record_finding",
    "record_outcome",
    "run_query",
    "run_workup",
    "satisfies_threshold",
    "select_focus",
    "serialize_kb",
    "validate_network",
]
