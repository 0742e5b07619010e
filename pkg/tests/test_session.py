"""Event-sourced consultation sessions: logs, folding, replay."""

from __future__ import annotations

import json
import re
import threading

import pytest

from helpers import CLASSIC_PATIENT
from mu.levels import BeliefLevel
from mu.network import OutOfDomainError, UnknownFindingError
from mu.session import (
    STATUS_AWAITING_INPUT,
    STATUS_RECOMMENDING,
    STATUS_TERMINATED,
    InvalidKbError,
    SessionStore,
    SessionTerminatedError,
    UnknownKbError,
    UnknownSessionError,
    export_trace,
    get_recommendation,
    new_session_id,
    record_finding,
    run_query,
    state_doc,
)

BROKEN_KB = """
kb broken

finding f1 {
  values: true, false
}

link f1 -> nowhere role potentially-supporting
"""


def drive_to_termination(store, session, answers):
    """Follow recommendations, answering from a fixed patient, until done."""
    for _ in range(60):
        doc = get_recommendation(store, session)
        if doc["kind"] == "disposition":
            return doc
        action_yields = doc["action"]["yields"]
        answered = False
        for finding in action_yields:
            if finding in answers and finding not in session.network.observations:
                record_finding(store, session, finding, answers[finding])
                answered = True
        if not answered:
            # Nothing to answer: the driver must still unblock the session.
            pytest.fail(f"no answer available for {action_yields}")
    pytest.fail("session never terminated")


class TestStoreLifecycle:
    def test_session_ids_are_128_bit_hex(self):
        token = new_session_id()
        assert re.fullmatch(r"[0-9a-f]{32}", token)
        assert new_session_id() != token

    def test_create_from_bundled_kb(self, store):
        session = store.create("chest-pain")
        assert session.kb_name == "chest-pain"
        assert session.status == STATUS_RECOMMENDING
        assert [e.kind for e in session.events] == ["created"]
        assert store.get(session.id) is session

    def test_registered_kbs_are_listed_and_used(self, store):
        store.register_kb("tiny", "kb tiny\n")
        assert "tiny" in store.kb_names()
        assert "chest-pain" in store.kb_names()
        session = store.create("tiny")
        assert session.network.nodes == {}

    def test_unknown_kb_is_rejected(self, store):
        with pytest.raises(UnknownKbError):
            store.create("no-such-kb")
        with pytest.raises(UnknownKbError):
            store.kb_text("no-such-kb")

    def test_invalid_kb_is_rejected_at_create_time(self, store):
        store.register_kb("broken", BROKEN_KB)
        with pytest.raises(InvalidKbError) as excinfo:
            store.create("broken")
        assert "dangling-reference" in str(excinfo.value)

    def test_unknown_session_is_rejected(self, store):
        with pytest.raises(UnknownSessionError):
            store.get("f" * 32)


class TestEventLog:
    def test_log_file_is_one_json_object_per_line(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        get_recommendation(store, session)
        path = store.data_dir / f"{session.id}.jsonl"
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 3
        docs = [json.loads(line) for line in lines]
        assert [d["kind"] for d in docs] == [
            "created",
            "finding-recorded",
            "recommended",
        ]
        assert [d["sequence"] for d in docs] == [1, 2, 3]
        for doc in docs:
            assert set(doc) == {"sequence", "timestamp", "kind", "payload"}

    def test_created_event_embeds_the_kb_text(self, store):
        session = store.create("chest-pain")
        payload = session.events[0].payload
        assert payload["kb"] == "chest-pain"
        assert payload["kb-text"].startswith("kb chest-pain")

    def test_sequence_numbers_are_dense(self, store):
        session = store.create("chest-pain")
        get_recommendation(store, session)
        record_finding(store, session, "age", 50)
        get_recommendation(store, session)
        sequences = [event.sequence for event in session.events]
        assert sequences == list(range(1, len(sequences) + 1))

    def test_rejected_finding_appends_no_event(self, store):
        session = store.create("chest-pain")
        count = len(session.events)
        with pytest.raises(OutOfDomainError):
            record_finding(store, session, "age", 999)
        with pytest.raises(UnknownFindingError):
            record_finding(store, session, "ghost", 1)
        assert len(session.events) == count
        assert session.network.observations == {}

    def test_rejected_query_appends_no_event(self, store):
        session = store.create("chest-pain")
        count = len(session.events)
        with pytest.raises(Exception):
            run_query(store, session, {"class": "state", "subject": "ghost",
                                       "parameter": "belief"})
        assert len(session.events) == count

    def test_successful_query_is_logged(self, store):
        session = store.create("chest-pain")
        result = run_query(
            store,
            session,
            {"class": "state", "subject": "angina", "parameter": "belief"},
        )
        assert result["value"] == "unknown"
        assert session.events[-1].kind == "query-run"
        assert session.events[-1].payload["request"]["class"] == "state"


class TestSessionFlow:
    def test_recommendation_polling_is_idempotent(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        first = get_recommendation(store, session)
        assert first["kind"] == "recommendation"
        count = len(session.events)
        second = get_recommendation(store, session)
        assert second == first
        assert len(session.events) == count  # no duplicate event
        assert session.status == STATUS_AWAITING_INPUT

    def test_blank_session_disposition_is_advisory(self, store):
        store.register_kb("empty", "kb empty\n")
        session = store.create("empty")
        doc = get_recommendation(store, session)
        assert doc["kind"] == "disposition"
        assert doc["disposition"] == "no-useful-action"
        # Nothing has been observed and nothing resolved: stay open.
        assert session.status == STATUS_RECOMMENDING

    def test_finding_flips_status_back_to_recommending(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        get_recommendation(store, session)
        assert session.status == STATUS_AWAITING_INPUT
        record_finding(store, session, "age", 50)
        assert session.status == STATUS_RECOMMENDING

    def test_performed_is_inferred_from_answered_yields(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        doc = get_recommendation(store, session)
        action_id = doc["action"]["id"]
        answers = dict(CLASSIC_PATIENT)
        first_yield = next(
            y for y in doc["action"]["yields"]
            if y not in session.network.observations
        )
        record_finding(store, session, first_yield, answers[first_yield])
        assert action_id in session.performed

    def test_unsolicited_finding_marks_nothing_performed(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        get_recommendation(store, session)  # recommends a question first
        record_finding(store, session, "angiogram-result", "negative")
        assert "angiogram" not in session.performed

    def test_record_finding_returns_beliefs_and_diff(self, store):
        session = store.create("chest-pain")
        result = record_finding(store, session, "age", 70)
        assert result.beliefs["angina-risk-factors"] is BeliefLevel.CONFIRMED
        changed = {node_id for node_id, _, _ in result.diff}
        assert changed == {"age", "angina-risk-factors", "angina"}

    def test_re_recording_the_same_value_is_an_empty_diff(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "age", 70)
        count = len(session.events)
        result = record_finding(store, session, "age", 70)
        assert result.diff == ()
        assert len(session.events) == count + 1  # still an event (audit)

    def test_full_workup_reaches_the_batch_outcome(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        doc = drive_to_termination(store, session, dict(CLASSIC_PATIENT))
        assert doc["disposition"] == "confirmed-set"
        assert doc["resolved"] == ["angina"]
        assert session.status == STATUS_TERMINATED
        assert session.network.beliefs["angina"] is BeliefLevel.CONFIRMED

    def test_terminated_sessions_echo_and_refuse_mutation(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        drive_to_termination(store, session, dict(CLASSIC_PATIENT))
        echo = get_recommendation(store, session)
        assert echo["kind"] == "disposition"
        assert echo["rationale"] == "session already terminated"
        count = len(session.events)
        with pytest.raises(SessionTerminatedError):
            record_finding(store, session, "age", 50)
        assert len(session.events) == count


class TestReplay:
    def test_restart_restores_every_session_exactly(self, store, tmp_path):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        get_recommendation(store, session)
        record_finding(store, session, "age", 45)
        record_finding(store, session, "sex", "male")
        store.close()

        reborn_store = SessionStore(store.data_dir)
        reborn_store.load()
        reborn = reborn_store.get(session.id)
        assert reborn.kb_name == session.kb_name
        assert reborn.status == session.status
        assert reborn.performed == session.performed
        assert reborn.network.observations == session.network.observations
        assert reborn.network.beliefs == session.network.beliefs
        assert [e.to_json() for e in reborn.events] == [
            e.to_json() for e in session.events
        ]
        reborn_store.close()

    def test_replay_restores_terminal_state(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        drive_to_termination(store, session, dict(CLASSIC_PATIENT))
        store.close()

        reborn_store = SessionStore(store.data_dir)
        reborn_store.load()
        reborn = reborn_store.get(session.id)
        assert reborn.status == STATUS_TERMINATED
        assert reborn.disposition == "confirmed-set"
        assert reborn.resolved == ("angina",)
        reborn_store.close()

    def test_replayed_session_continues_accepting_events(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        store.close()

        reborn_store = SessionStore(store.data_dir)
        reborn_store.load()
        reborn = reborn_store.get(session.id)
        record_finding(reborn_store, reborn, "age", 70)
        assert reborn.network.beliefs["angina-risk-factors"] is BeliefLevel.CONFIRMED
        reborn_store.close()


class TestDocuments:
    def test_state_doc_shape(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "age", 70)
        doc = state_doc(session)
        assert doc["id"] == session.id
        assert doc["kb"] == "chest-pain"
        assert doc["status"] == STATUS_RECOMMENDING
        assert doc["observations"] == {"age": "over-60"}
        assert doc["beliefs"]["angina-risk-factors"] == "confirmed"
        node_index = {row["id"]: row for row in doc["nodes"]}
        assert node_index["age"]["observed"] is True
        assert node_index["age"]["value"] == "over-60"
        assert node_index["angina"]["dangerous"] is True
        assert node_index["angina"]["critical"] is True
        action_index = {row["id"]: row for row in doc["actions"]}
        assert action_index["ekg"]["performed"] is False
        assert [entry[0] for entry in doc["last-diff"]] == [
            "age",
            "angina-risk-factors",
            "angina",
        ]

    def test_trace_groups_cycles_and_presenting(self, store):
        session = store.create("chest-pain")
        record_finding(store, session, "substernal-pain", "present")
        doc = drive_to_termination(store, session, dict(CLASSIC_PATIENT))
        trace = export_trace(session)
        assert trace["presenting"] == {"substernal-pain": "present"}
        assert trace["disposition"] == "confirmed-set"
        assert trace["resolved"] == ["angina"]
        actions = [entry["action"] for entry in trace["entries"]]
        assert actions == [
            "ask-episode",
            "ask-age",
            "ask-sex",
            "ekg",
            "trial-therapy",
            "stress-test",
            "angiogram",
        ]
        for entry in trace["entries"]:
            assert set(entry) == {
                "cycle",
                "focus",
                "candidates",
                "action",
                "observed",
                "diff",
            }
        assert [e["kind"] for e in trace["events"]][:2] == [
            "created",
            "finding-recorded",
        ]


class TestConcurrency:
    def test_parallel_findings_serialize_per_session(self, store):
        session = store.create("chest-pain")
        values = dict(CLASSIC_PATIENT)
        errors = []

        def worker(finding, value):
            try:
                record_finding(store, session, finding, value)
            except Exception as exc:  # pragma: no cover - failure reporting
                errors.append(exc)

        threads = [
            threading.Thread(target=worker, args=item) for item in values.items()
        ]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert errors == []
        assert len(session.network.observations) == len(values)
        sequences = [event.sequence for event in session.events]
        assert sequences == list(range(1, len(sequences) + 1))
        path = store.data_dir / f"{session.id}.jsonl"
        lines = path.read_text().strip().split("\n")
        assert len(lines) == len(session.events)
