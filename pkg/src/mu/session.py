"""Event-sourced consultation sessions with append-only JSONL persistence.

A session's state is a pure function of its event log: every mutation is an
appended event, each append is fsynced, and replaying the log (after a crash
or in another process) reconstructs the exact same observations, beliefs,
and status. The five event kinds are created, recommended, finding-recorded,
query-run, and terminated.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Any

from . import protocol, queries
from .bundled import BUNDLED_NAMES, bundled_text
from .kblang import KbParseError, parse_expression, parse_kb
from .levels import BeliefLevel, CostVector
from .network import (
    Network,
    NetworkValidationError,
    NodeKind,
    PropagationResult,
    propagate,
)
from .planner import (
    CONFIRMED_SET,
    DISCONFIRMED_SET,
    NO_USEFUL_ACTION,
    candidate_actions,
    choose_action,
    select_focus,
)
from .protocol import (
    MalformedRequestError,
    action_to_dict,
    beliefs_to_json,
    diff_to_json,
    focus_to_dict,
    node_rows,
    param_to_json,
)

STATUS_RECOMMENDING = "recommending"
STATUS_AWAITING_INPUT = "awaiting-input"
STATUS_TERMINATED = "terminated"


class SessionError(Exception):
    """Base for session-layer failures; ``code`` names the wire error."""

    code = "session-error"


class UnknownKbError(SessionError):
    code = "unknown-kb"


class InvalidKbError(SessionError):
    code = "invalid-kb"


class UnknownSessionError(SessionError):
    code = "unknown-session"


class SessionTerminatedError(SessionError):
    code = "session-terminated"


def new_session_id() -> str:
    """Random 128-bit token in hex."""
    return secrets.token_hex(16)


@dataclass(frozen=True)
class SessionEvent:
    """One appended log record; sequence numbers are dense from 1."""

    sequence: int
    timestamp: str
    kind: str
    payload: dict[str, Any]

    def to_json(self) -> dict[str, Any]:
        return {
            "sequence": self.sequence,
            "timestamp": self.timestamp,
            "kind": self.kind,
            "payload": self.payload,
        }

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> SessionEvent:
        return cls(
            sequence=doc["sequence"],
            timestamp=doc["timestamp"],
            kind=doc["kind"],
            payload=doc["payload"],
        )


@dataclass
class Session:
    """In-memory state folded from a session's event log."""

    id: str
    kb_name: str = ""
    network: Network | None = None
    events: list[SessionEvent] = field(default_factory=list)
    status: str = STATUS_RECOMMENDING
    performed: set[str] = field(default_factory=set)
    last_recommendation: dict[str, Any] | None = None
    last_diff: tuple[tuple[str, BeliefLevel, BeliefLevel], ...] = ()
    disposition: str | None = None
    resolved: tuple[str, ...] = ()
    lock: threading.RLock = field(
        default_factory=threading.RLock, repr=False, compare=False
    )

    def apply(self, event: SessionEvent) -> None:
        """Fold one event into the state. Folding is the only mutation path."""
        if event.kind == "created":
            self.kb_name = event.payload["kb"]
            kb = parse_kb(
                event.payload["kb-text"], filename=f"session:{self.kb_name}.mu"
            )
            self.network = kb.build()
        elif event.kind == "recommended":
            self.last_recommendation = event.payload
            self.status = STATUS_AWAITING_INPUT
        elif event.kind == "finding-recorded":
            assert self.network is not None
            finding = event.payload["finding"]
            merged = dict(self.network.observations)
            merged[finding] = event.payload["value"]
            result = propagate(self.network, merged)
            self.last_diff = result.diff
            if self.last_recommendation is not None:
                action_id = self.last_recommendation["action"]
                if finding in self.network.actions[action_id].yields:
                    self.performed.add(action_id)
            self.status = STATUS_RECOMMENDING
        elif event.kind == "query-run":
            pass
        elif event.kind == "terminated":
            self.status = STATUS_TERMINATED
            self.disposition = event.payload["disposition"]
            self.resolved = tuple(event.payload["resolved"])
        else:
            raise ValueError(f"unknown event kind {event.kind!r}")
        self.events.append(event)


class SessionStore:
    """Registry of live sessions backed by one JSONL file per session."""

    def __init__(self, data_dir: str | Path, kbs: dict[str, str] | None = None):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self._files: dict[str, IO[str]] = {}
        self._kbs: dict[str, str] = dict(kbs or {})
        self._lock = threading.Lock()

    # -- knowledge-base registry ------------------------------------------

    def register_kb(self, name: str, text: str) -> None:
        self._kbs[name] = text

    def kb_names(self) -> list[str]:
        return sorted(set(BUNDLED_NAMES) | set(self._kbs))

    def kb_text(self, name: str) -> str:
        if name in self._kbs:
            return self._kbs[name]
        if name in BUNDLED_NAMES:
            return bundled_text(name)
        raise UnknownKbError(f"no knowledge base named {name!r}")

    # -- lifecycle ---------------------------------------------------------

    def create(self, kb_name: str) -> Session:
        text = self.kb_text(kb_name)
        try:
            parse_kb(text, filename=f"session:{kb_name}.mu").build()
        except (KbParseError, NetworkValidationError) as exc:
            raise InvalidKbError(str(exc)) from exc
        with self._lock:
            session_id = new_session_id()
            while session_id in self.sessions:
                session_id = new_session_id()
            session = Session(id=session_id)
            self.sessions[session_id] = session
        self.append(session, "created", {"kb": kb_name, "kb-text": text})
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"no session {session_id!r}") from None

    def load(self) -> None:
        """Replay every persisted log, restoring all sessions exactly."""
        for path in sorted(self.data_dir.glob("*.jsonl")):
            session_id = path.stem
            if session_id in self.sessions:
                continue
            session = Session(id=session_id)
            with path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if line:
                        session.apply(SessionEvent.from_json(json.loads(line)))
            self.sessions[session_id] = session

    def close(self) -> None:
        for handle in self._files.values():
            handle.close()
        self._files.clear()

    # -- the append path ----------------------------------------------------

    def _handle(self, session_id: str) -> IO[str]:
        handle = self._files.get(session_id)
        if handle is None or handle.closed:
            path = self.data_dir / f"{session_id}.jsonl"
            handle = path.open("a", encoding="utf-8")
            self._files[session_id] = handle
        return handle

    def append(self, session: Session, kind: str, payload: dict[str, Any]) -> SessionEvent:
        """Persist one event (fsync before acknowledging) and fold it."""
        event = SessionEvent(
            sequence=len(session.events) + 1,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="milliseconds"),
            kind=kind,
            payload=payload,
        )
        handle = self._handle(session.id)
        handle.write(json.dumps(event.to_json(), separators=(",", ":")) + "\n")
        handle.flush()
        os.fsync(handle.fileno())
        session.apply(event)
        return event


# ---------------------------------------------------------------------------
# Session operations (shared by the HTTP service and the CLI)

def _terminal_disposition(network: Network) -> tuple[str, tuple[str, ...]]:
    confirmed = tuple(
        node.id
        for node in network.hypotheses()
        if network.beliefs[node.id] is BeliefLevel.CONFIRMED
    )
    if confirmed:
        return CONFIRMED_SET, confirmed
    disconfirmed = tuple(
        node.id
        for node in network.hypotheses()
        if network.beliefs[node.id] is BeliefLevel.DISCONFIRMED
    )
    if disconfirmed:
        return DISCONFIRMED_SET, disconfirmed
    return NO_USEFUL_ACTION, ()


def compute_recommendation(session: Session) -> dict[str, Any]:
    """Recommendation (or terminal disposition) for the current state.

    Pure read: appends nothing. The rationale spells out the control
    parameters that drove the choice — focus tier, cost under the strategy's
    priority, and the marginal-utility bound.
    """
    network = session.network
    assert network is not None
    focus = select_focus(network)
    if focus is None:
        disposition, resolved = _terminal_disposition(network)
        return {
            "kind": "disposition",
            "disposition": disposition,
            "resolved": list(resolved),
            "rationale": "no hypothesis is in focus",
        }
    candidates = candidate_actions(network, focus.node_id, session.performed)
    if not candidates:
        disposition, resolved = _terminal_disposition(network)
        return {
            "kind": "disposition",
            "disposition": disposition,
            "resolved": list(resolved),
            "rationale": f"no useful action remains for focus {focus.node_id}",
        }
    action = choose_action(candidates, network.strategy)
    score = dict((spec.id, s) for spec, s in candidates)[action.id]
    priority = ", ".join(network.strategy.cost_priority)
    rationale = (
        f"focus {focus.node_id} ({focus.tier}); cheapest candidate under "
        f"cost priority ({priority}); marginal-utility bound {score}"
    )
    return {
        "kind": "recommendation",
        "focus": focus_to_dict(focus),
        "action": action_to_dict(action, performed=action.id in session.performed),
        "score": score,
        "candidates": [[spec.id, s] for spec, s in candidates],
        "rationale": rationale,
    }


def get_recommendation(store: SessionStore, session: Session) -> dict[str, Any]:
    """Compute, log, and return the next step for the session.

    A fresh recommendation appends a ``recommended`` event (skipped when it
    would duplicate the one already pending); reaching a terminal state
    appends ``terminated`` once; an already-terminated session just echoes
    its disposition.
    """
    with session.lock:
        if session.status == STATUS_TERMINATED:
            return {
                "kind": "disposition",
                "disposition": session.disposition,
                "resolved": list(session.resolved),
                "rationale": "session already terminated",
            }
        doc = compute_recommendation(session)
        if doc["kind"] == "disposition":
            network = session.network
            assert network is not None
            # A blank session has nothing in focus yet; that is advice, not
            # an outcome. Terminate only once the workup actually started.
            if doc["resolved"] or network.observations:
                store.append(
                    session,
                    "terminated",
                    {"disposition": doc["disposition"], "resolved": doc["resolved"]},
                )
            return doc
        payload = {
            "action": doc["action"]["id"],
            "focus": doc["focus"],
            "score": doc["score"],
            "candidates": doc["candidates"],
            "rationale": doc["rationale"],
        }
        if not (
            session.status == STATUS_AWAITING_INPUT
            and session.last_recommendation == payload
        ):
            store.append(session, "recommended", payload)
        return doc


def record_finding(
    store: SessionStore, session: Session, finding: str, value: Any
) -> PropagationResult:
    """Validate, persist, and propagate one observation.

    Validation happens before the append, so a rejected value leaves no
    event behind; the stored value is the normalized domain label.
    """
    with session.lock:
        if session.status == STATUS_TERMINATED:
            raise SessionTerminatedError(f"session {session.id} is terminated")
        network = session.network
        assert network is not None
        normalized = network.normalize_value(finding, value)
        merged = dict(network.observations)
        merged[finding] = normalized
        new_beliefs = network.beliefs_for(merged)  # raises before any mutation
        diff = [
            [node_id, old.label, new_beliefs[node_id].label]
            for node_id, old in network.beliefs.items()
            if new_beliefs[node_id] is not old
        ]
        store.append(
            session,
            "finding-recorded",
            {"finding": finding, "value": normalized, "diff": diff},
        )
        return PropagationResult(
            beliefs=dict(network.beliefs),
            dynamic_params=dict(network.dynamic_params),
            diff=session.last_diff,
        )


def run_query(store: SessionStore, session: Session, request: dict[str, Any]) -> dict[str, Any]:
    """Execute one of the five query classes against the session's state.

    Read-only with respect to beliefs; a successful run is logged as a
    ``query-run`` event, a failed one leaves no event.
    """
    protocol.validate_request("query", request)
    with session.lock:
        network = session.network
        assert network is not None
        result = execute_query(network, request)
        store.append(session, "query-run", {"request": request})
        return result


def execute_query(network: Network, request: dict[str, Any]) -> dict[str, Any]:
    cls = request["class"]
    if cls == "state":
        value = queries.query_state(network, request["subject"], request["parameter"])
        return {
            "class": "state",
            "subject": request["subject"],
            "parameter": request["parameter"],
            "value": param_to_json(value),
        }
    if cls == "change":
        ceiling = (
            CostVector.from_dict(request["ceiling"]) if "ceiling" in request else None
        )
        plans = queries.query_change(
            network,
            request["target"],
            request["direction"],
            ceiling=ceiling,
            bound=request.get("bound", queries.ORACLE_BOUND),
        )
        return {
            "class": "change",
            "target": request["target"],
            "direction": request["direction"],
            "plans": [
                {
                    "assignments": dict(plan.assignments),
                    "resulting-belief": plan.resulting_belief.label,
                    "rank-change": plan.rank_change,
                    "actions": list(plan.supplying_actions),
                    "cost": plan.cost.to_dict(),
                }
                for plan in plans
            ],
        }
    if cls == "focus":
        predicate = queries.NodePredicate(
            kind=NodeKind(request["kind"]) if "kind" in request else None,
            expression=(
                parse_expression(request["expression"])
                if "expression" in request
                else None
            ),
            supports=request.get("supports"),
            detracts=request.get("detracts"),
        )
        nodes = queries.query_focus(network, predicate)
        return {"class": "focus", "nodes": sorted(nodes)}
    if cls == "effect":
        nodes = queries.query_effect(
            network,
            request["finding"],
            request["mode"],
            bound=request.get("bound", queries.ORACLE_BOUND),
        )
        return {
            "class": "effect",
            "finding": request["finding"],
            "mode": request["mode"],
            "nodes": sorted(nodes),
        }
    if cls == "discriminate":
        mode = request.get("mode", "auto")
        bound = request.get("bound", queries.ORACLE_BOUND)
        discriminators = queries.query_discriminate(
            network, request["first"], request["second"], mode=mode, bound=bound
        )
        resolved_mode = mode
        if mode == "auto":
            resolved_mode = (
                "semantic"
                if queries.context_space_size(network) <= bound
                else "heuristic"
            )
        return {
            "class": "discriminate",
            "first": request["first"],
            "second": request["second"],
            "mode": resolved_mode,
            "discriminators": sorted(discriminators),
        }
    raise MalformedRequestError(f"unknown query class {cls!r}")


def state_doc(session: Session) -> dict[str, Any]:
    """The full state response: observations, beliefs, nodes, actions."""
    with session.lock:
        network = session.network
        assert network is not None
        return {
            "id": session.id,
            "kb": session.kb_name,
            "status": session.status,
            "observations": dict(network.observations),
            "beliefs": beliefs_to_json(network.beliefs),
            "nodes": node_rows(network),
            "actions": [
                action_to_dict(
                    network.actions[action_id],
                    performed=action_id in session.performed,
                )
                for action_id in network.action_order
            ],
            "last-diff": diff_to_json(session.last_diff),
            "disposition": session.disposition,
            "resolved": list(session.resolved),
        }


def export_trace(session: Session) -> dict[str, Any]:
    """Serialize the session as a trace document.

    ``entries`` groups the log into cycles (one per recommendation, findings
    recorded before any recommendation count as presenting evidence);
    ``events`` carries the raw log so a client can replay the session.
    """
    with session.lock:
        network = session.network
        assert network is not None
        presenting: dict[str, str] = {}
        entries: list[dict[str, Any]] = []
        current: dict[str, Any] | None = None
        for event in session.events:
            if event.kind == "recommended":
                if current is not None:
                    entries.append(current)
                current = {
                    "cycle": len(entries) + 1,
                    "focus": event.payload["focus"],
                    "candidates": event.payload["candidates"],
                    "action": event.payload["action"],
                    "observed": {},
                    "diff": [],
                }
            elif event.kind == "finding-recorded":
                record = {event.payload["finding"]: event.payload["value"]}
                if current is None:
                    presenting.update(record)
                else:
                    current["observed"].update(record)
                    current["diff"].extend(event.payload.get("diff", []))
        if current is not None:
            entries.append(current)
        return {
            "id": session.id,
            "kb": session.kb_name,
            "status": session.status,
            "presenting": presenting,
            "entries": entries,
            "events": [event.to_json() for event in session.events],
            "beliefs": beliefs_to_json(network.beliefs),
            "disposition": session.disposition,
            "resolved": list(session.resolved),
        }
