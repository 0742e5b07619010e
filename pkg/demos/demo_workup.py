"""Narrated consultation: watch the planner work a chest-pain case.

Runs the bundled knowledge base against a canned patient and prints, for
every control cycle, which hypothesis the engine focused on, which actions
were in the running with their marginal-utility scores, what it chose, and
how the answers moved the beliefs.

    python demos/demo_workup.py
"""

from __future__ import annotations

from mu import PatientModel, bundled_kb, run_workup

PATIENT = {
    "substernal-pain": "present",
    "pain-after-eating": False,
    "episode-pattern": "exertional",
    "age": 45,
    "sex": "male",
    "ekg-result": "normal",
    "during-episode": False,
    "therapy-response": "abated",
    "stress-test-result": "severe",
    "angiogram-result": "positive",
}


def main() -> None:
    kb = bundled_kb("chest-pain")
    network = kb.build()
    print(f"knowledge base: {kb.name}")
    print(f"patient answers on file: {len(PATIENT)}")
    print()

    trace = run_workup(network, PatientModel(PATIENT))

    print(f"presenting evidence: {trace.presenting}")
    for entry in trace.entries:
        focus = entry.focus
        assert focus is not None
        print(f"\ncycle {entry.cycle}: focus on {focus.node_id} ({focus.tier})")
        print(f"  because {focus.rationale}")
        ranked = ", ".join(f"{aid} (score {score})" for aid, score in entry.candidates)
        print(f"  candidates: {ranked}")
        print(f"  -> perform {entry.action_id}")
        if entry.observed:
            for finding, value in entry.observed.items():
                print(f"     observed {finding} = {value}")
        else:
            print("     no answer available")
        for node, old, new in entry.diff:
            print(f"     belief {node}: {old} -> {new}")

    print(f"\ndisposition: {trace.disposition}")
    for node in trace.resolved:
        print(f"  resolved: {node} = {network.beliefs[node]}")

    cheap = [e.action_id for e in trace.entries[:3]]
    print(
        "\nNote the order: the free questions "
        + ", ".join(cheap)
        + " all ran before any test, and the angiogram — the only high-risk,"
        " very-expensive action — ran last, once cheaper evidence had pushed"
        " angina high enough to satisfy its precondition."
    )


if __name__ == "__main__":
    main()
