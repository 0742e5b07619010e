"""JSON wire formats for the ``/v1`` consultation protocol.

The schemas here are the single source of truth for what goes over the
wire: the service validates request bodies against them, the test suite
validates every response, and ``docs/protocol.md`` renders them for client
authors. Serializers for the engine's dataclasses live alongside so the
service, the CLI, and trace export cannot drift apart.
"""

from __future__ import annotations

from typing import Any

from jsonschema import Draft202012Validator, ValidationError

from .actions import ActionKind, ActionSpec
from .levels import ALL_LEVELS, BeliefLevel, CostGrade, CostVector
from .network import Network, NodeKind, PropagationResult
from .planner import FocusChoice, SessionTrace

LEVEL_LABELS = tuple(level.label for level in ALL_LEVELS)
GRADE_LABELS = tuple(grade.label for grade in CostGrade)
STATUSES = ("recommending", "awaiting-input", "terminated")
DISPOSITIONS = ("confirmed-set", "disconfirmed-set", "no-useful-action")
EVENT_KINDS = ("created", "recommended", "finding-recorded", "query-run", "terminated")
QUERY_CLASSES = ("state", "change", "focus", "effect", "discriminate")
FOCUS_TIERS = ("critical", "triggered-dangerous", "triggered")


class MalformedRequestError(ValueError):
    """A request body does not match its schema."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(message)


# ---------------------------------------------------------------------------
# Schema building blocks

_LEVEL = {"type": "string", "enum": list(LEVEL_LABELS)}
_GRADE = {"type": "string", "enum": list(GRADE_LABELS)}
_IDENT = {"type": "string", "minLength": 1}
_COST = {
    "type": "object",
    "properties": {"monetary": _GRADE, "risk": _GRADE, "discomfort": _GRADE},
    "required": ["monetary", "risk", "discomfort"],
    "additionalProperties": False,
}
_DIFF = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [_IDENT, _LEVEL, _LEVEL],
        "minItems": 3,
        "maxItems": 3,
    },
}
_FOCUS = {
    "type": "object",
    "properties": {
        "node": _IDENT,
        "tier": {"type": "string", "enum": list(FOCUS_TIERS)},
        "rationale": {"type": "string"},
    },
    "required": ["node", "tier", "rationale"],
    "additionalProperties": False,
}
_ACTION = {
    "type": "object",
    "properties": {
        "id": _IDENT,
        "kind": {"type": "string", "enum": [kind.value for kind in ActionKind]},
        "cost": _COST,
        "yields": {"type": "array", "items": _IDENT},
        "preconditions": {"type": "array", "items": {"type": "string"}},
        "repeatable": {"type": "boolean"},
        "performed": {"type": "boolean"},
    },
    "required": ["id", "kind", "cost", "yields", "preconditions", "repeatable"],
    "additionalProperties": False,
}
_CANDIDATES = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [_IDENT, {"type": "integer", "minimum": 0}],
        "minItems": 2,
        "maxItems": 2,
    },
}
_NODE_ROW = {
    "type": "object",
    "properties": {
        "id": _IDENT,
        "kind": {"type": "string", "enum": ["finding", "cluster", "hypothesis"]},
        "belief": _LEVEL,
        "observed": {"type": "boolean"},
        "value": {"type": ["string", "null"]},
        "domain": {"type": "array", "items": {"type": "string"}},
        "dangerous": {"type": "boolean"},
        "triggered": {"type": "boolean"},
        "critical": {"type": "boolean"},
    },
    "required": ["id", "kind", "belief"],
    "additionalProperties": False,
}
_OBSERVATIONS = {"type": "object", "additionalProperties": {"type": "string"}}
_BELIEFS = {"type": "object", "additionalProperties": _LEVEL}
_EVENT = {
    "type": "object",
    "properties": {
        "sequence": {"type": "integer", "minimum": 1},
        "timestamp": {"type": "string"},
        "kind": {"type": "string", "enum": list(EVENT_KINDS)},
        "payload": {"type": "object"},
    },
    "required": ["sequence", "timestamp", "kind", "payload"],
    "additionalProperties": False,
}
_TRACE_ENTRY = {
    "type": "object",
    "properties": {
        "cycle": {"type": "integer", "minimum": 1},
        "focus": {"oneOf": [_FOCUS, {"type": "null"}]},
        "candidates": _CANDIDATES,
        "action": _IDENT,
        "observed": _OBSERVATIONS,
        "diff": _DIFF,
    },
    "required": ["cycle", "focus", "candidates", "action", "observed", "diff"],
    "additionalProperties": False,
}
_CHANGE_PLAN = {
    "type": "object",
    "properties": {
        "assignments": _OBSERVATIONS,
        "resulting-belief": _LEVEL,
        "rank-change": {"type": "integer"},
        "actions": {"type": "array", "items": _IDENT},
        "cost": _COST,
    },
    "required": ["assignments", "resulting-belief", "rank-change", "actions", "cost"],
    "additionalProperties": False,
}

_DISPOSITION_DOC = {
    "type": "object",
    "properties": {
        "kind": {"const": "disposition"},
        "disposition": {"type": "string", "enum": list(DISPOSITIONS)},
        "resolved": {"type": "array", "items": _IDENT},
        "rationale": {"type": "string"},
    },
    "required": ["kind", "disposition", "resolved", "rationale"],
    "additionalProperties": False,
}
_RECOMMENDATION_DOC = {
    "type": "object",
    "properties": {
        "kind": {"const": "recommendation"},
        "focus": _FOCUS,
        "action": _ACTION,
        "score": {"type": "integer", "minimum": 0},
        "candidates": _CANDIDATES,
        "rationale": {"type": "string"},
    },
    "required": ["kind", "focus", "action", "score", "candidates", "rationale"],
    "additionalProperties": False,
}

# ---------------------------------------------------------------------------
# Request schemas

REQUEST_SCHEMAS: dict[str, dict[str, Any]] = {
    "create-session": {
        "type": "object",
        "properties": {"kb": _IDENT},
        "required": ["kb"],
        "additionalProperties": False,
    },
    "record-finding": {
        "type": "object",
        "properties": {
            "finding": _IDENT,
            "value": {"type": ["string", "number", "boolean"]},
        },
        "required": ["finding", "value"],
        "additionalProperties": False,
    },
    "query": {
        "type": "object",
        "required": ["class"],
        "properties": {"class": {"type": "string", "enum": list(QUERY_CLASSES)}},
        "oneOf": [
            {
                "properties": {
                    "class": {"const": "state"},
                    "subject": _IDENT,
                    "parameter": _IDENT,
                },
                "required": ["class", "subject", "parameter"],
                "additionalProperties": False,
            },
            {
                "properties": {
                    "class": {"const": "change"},
                    "target": _IDENT,
                    "direction": {"type": "string", "enum": ["increase", "decrease"]},
                    "ceiling": _COST,
                    "bound": {"type": "integer", "minimum": 1},
                },
                "required": ["class", "target", "direction"],
                "additionalProperties": False,
            },
            {
                "properties": {
                    "class": {"const": "focus"},
                    "kind": {
                        "type": "string",
                        "enum": ["finding", "cluster", "hypothesis"],
                    },
                    "expression": {"type": "string"},
                    "supports": _IDENT,
                    "detracts": _IDENT,
                },
                "required": ["class"],
                "additionalProperties": False,
            },
            {
                "properties": {
                    "class": {"const": "effect"},
                    "finding": _IDENT,
                    "mode": {"type": "string", "enum": ["syntactic", "semantic"]},
                    "bound": {"type": "integer", "minimum": 1},
                },
                "required": ["class", "finding", "mode"],
                "additionalProperties": False,
            },
            {
                "properties": {
                    "class": {"const": "discriminate"},
                    "first": _IDENT,
                    "second": _IDENT,
                    "mode": {
                        "type": "string",
                        "enum": ["auto", "heuristic", "semantic"],
                    },
                    "bound": {"type": "integer", "minimum": 1},
                },
                "required": ["class", "first", "second"],
                "additionalProperties": False,
            },
        ],
    },
}

# ---------------------------------------------------------------------------
# Response schemas

RESPONSE_SCHEMAS: dict[str, dict[str, Any]] = {
    "error": {
        "type": "object",
        "properties": {
            "code": _IDENT,
            "message": {"type": "string"},
            "location": {"type": "string"},
        },
        "required": ["code", "message"],
        "additionalProperties": False,
    },
    "state": {
        "type": "object",
        "properties": {
            "id": _IDENT,
            "kb": _IDENT,
            "status": {"type": "string", "enum": list(STATUSES)},
            "observations": _OBSERVATIONS,
            "beliefs": _BELIEFS,
            "nodes": {"type": "array", "items": _NODE_ROW},
            "actions": {"type": "array", "items": _ACTION},
            "last-diff": _DIFF,
            "disposition": {
                "oneOf": [{"type": "string", "enum": list(DISPOSITIONS)}, {"type": "null"}]
            },
            "resolved": {"type": "array", "items": _IDENT},
        },
        "required": [
            "id",
            "kb",
            "status",
            "observations",
            "beliefs",
            "nodes",
            "actions",
            "last-diff",
            "disposition",
            "resolved",
        ],
        "additionalProperties": False,
    },
    "recommendation": {"oneOf": [_RECOMMENDATION_DOC, _DISPOSITION_DOC]},
    "finding-recorded": {
        "type": "object",
        "properties": {
            "finding": _IDENT,
            "value": {"type": "string"},
            "diff": _DIFF,
            "beliefs": _BELIEFS,
            "status": {"type": "string", "enum": list(STATUSES)},
        },
        "required": ["finding", "value", "diff", "beliefs", "status"],
        "additionalProperties": False,
    },
    "query-result": {
        "type": "object",
        "required": ["class"],
        "properties": {"class": {"type": "string", "enum": list(QUERY_CLASSES)}},
        "oneOf": [
            {
                "properties": {
                    "class": {"const": "state"},
                    "subject": _IDENT,
                    "parameter": _IDENT,
                    "value": {"type": ["string", "boolean", "integer"]},
                },
                "required": ["class", "subject", "parameter", "value"],
                "additionalProperties": False,
            },
            {
                "properties": {
                    "class": {"const": "change"},
                    "target": _IDENT,
                    "direction": {"type": "string", "enum": ["increase", "decrease"]},
                    "plans": {"type": "array", "items": _CHANGE_PLAN},
                },
                "required": ["class", "target", "direction", "plans"],
                "additionalProperties": False,
            },
            {
                "properties": {
                    "class": {"const": "focus"},
                    "nodes": {"type": "array", "items": _IDENT},
                },
                "required": ["class", "nodes"],
                "additionalProperties": False,
            },
            {
                "properties": {
                    "class": {"const": "effect"},
                    "finding": _IDENT,
                    "mode": {"type": "string", "enum": ["syntactic", "semantic"]},
                    "nodes": {"type": "array", "items": _IDENT},
                },
                "required": ["class", "finding", "mode", "nodes"],
                "additionalProperties": False,
            },
            {
                "properties": {
                    "class": {"const": "discriminate"},
                    "first": _IDENT,
                    "second": _IDENT,
                    "mode": {"type": "string", "enum": ["heuristic", "semantic"]},
                    "discriminators": {"type": "array", "items": _IDENT},
                },
                "required": ["class", "first", "second", "mode", "discriminators"],
                "additionalProperties": False,
            },
        ],
    },
    "trace": {
        "type": "object",
        "properties": {
            "id": _IDENT,
            "kb": _IDENT,
            "status": {"type": "string", "enum": list(STATUSES)},
            "presenting": _OBSERVATIONS,
            "entries": {"type": "array", "items": _TRACE_ENTRY},
            "events": {"type": "array", "items": _EVENT},
            "beliefs": _BELIEFS,
            "disposition": {
                "oneOf": [{"type": "string", "enum": list(DISPOSITIONS)}, {"type": "null"}]
            },
            "resolved": {"type": "array", "items": _IDENT},
            "cycle-limit-hit": {"type": "boolean"},
        },
        "required": ["presenting", "entries", "beliefs", "disposition", "resolved"],
        "additionalProperties": False,
    },
}

_VALIDATORS: dict[tuple[str, str], Draft202012Validator] = {}


def _validator(kind: str, name: str) -> Draft202012Validator:
    key = (kind, name)
    if key not in _VALIDATORS:
        schemas = REQUEST_SCHEMAS if kind == "request" else RESPONSE_SCHEMAS
        _VALIDATORS[key] = Draft202012Validator(schemas[name])
    return _VALIDATORS[key]


def validate_request(name: str, doc: Any) -> None:
    """Check a request body, raising MalformedRequestError with a location."""
    try:
        _validator("request", name).validate(doc)
    except ValidationError as exc:
        raise MalformedRequestError(exc.message, location=exc.json_path) from exc


def validate_response(name: str, doc: Any) -> None:
    """Check a response document against its schema (used by the tests)."""
    _validator("response", name).validate(doc)


# ---------------------------------------------------------------------------
# Serializers

def param_to_json(value: Any) -> Any:
    """Render a control-parameter value for the wire."""
    if isinstance(value, BeliefLevel):
        return value.label
    if isinstance(value, CostGrade):
        return value.label
    if isinstance(value, ActionKind):
        return value.value
    return value


def diff_to_json(
    diff: tuple[tuple[str, BeliefLevel, BeliefLevel], ...]
) -> list[list[str]]:
    return [[node, old.label, new.label] for node, old, new in diff]


def beliefs_to_json(beliefs: dict[str, BeliefLevel]) -> dict[str, str]:
    return {node: level.label for node, level in beliefs.items()}


def focus_to_dict(choice: FocusChoice) -> dict[str, str]:
    return {
        "node": choice.node_id,
        "tier": choice.tier,
        "rationale": choice.rationale,
    }


def action_to_dict(action: ActionSpec, performed: bool | None = None) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "id": action.id,
        "kind": action.kind.value,
        "cost": action.cost.to_dict(),
        "yields": list(action.yields),
        "preconditions": [pre.unparse() for pre in action.preconditions],
        "repeatable": action.repeatable,
    }
    if performed is not None:
        doc["performed"] = performed
    return doc


def node_rows(network: Network) -> list[dict[str, Any]]:
    """Per-node wire rows: belief plus the kind-specific parameters."""
    rows: list[dict[str, Any]] = []
    for node_id in network.declaration_order:
        node = network.nodes[node_id]
        row: dict[str, Any] = {
            "id": node.id,
            "kind": node.kind.value,
            "belief": network.beliefs[node.id].label,
        }
        if node.kind is NodeKind.FINDING:
            row["observed"] = node.id in network.observations
            row["value"] = network.observations.get(node.id)
            row["domain"] = list(node.domain.values)
        else:
            params = network.node_params(node.id)
            row["triggered"] = bool(params.get("triggered"))
            if node.kind is NodeKind.HYPOTHESIS:
                row["dangerous"] = bool(params.get("dangerous"))
                if "critical" in params:
                    row["critical"] = bool(params.get("critical"))
        rows.append(row)
    return rows


def trace_to_dict(trace: SessionTrace, **extra: Any) -> dict[str, Any]:
    """Serialize a batch SessionTrace; ``extra`` adds session-level fields."""
    doc: dict[str, Any] = {
        "presenting": dict(trace.presenting),
        "entries": [
            {
                "cycle": entry.cycle,
                "focus": focus_to_dict(entry.focus) if entry.focus else None,
                "candidates": [list(pair) for pair in entry.candidates],
                "action": entry.action_id,
                "observed": dict(entry.observed),
                "diff": diff_to_json(entry.diff),
            }
            for entry in trace.entries
        ],
        "disposition": trace.disposition,
        "resolved": list(trace.resolved),
        "cycle-limit-hit": trace.cycle_limit_hit,
    }
    doc.update(extra)
    return doc
