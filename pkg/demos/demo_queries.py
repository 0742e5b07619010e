"""Tour of the five query classes on the chest-pain knowledge base.

Each section sets up a small evidence context, runs one query class, and
explains what the result means.

    python demos/demo_queries.py
"""

from __future__ import annotations

import json
from typing import Any

from mu import bundled_network, execute_query, propagate


def show(title: str, result: dict[str, Any]) -> None:
    print(f"\n== {title}")
    print(json.dumps(result, indent=2))


def main() -> None:
    network = bundled_network("chest-pain")

    # state: read one parameter off one node.
    propagate(network, {"age": 70})
    show(
        "state: what does a 70-year-old's age alone do to angina?",
        execute_query(network, {"class": "state", "subject": "angina", "parameter": "belief"}),
    )

    # change: minimal evidence that would raise the belief further,
    # restricted to cheap options.
    show(
        "change: cheapest unobserved evidence that raises angina",
        execute_query(
            network,
            {
                "class": "change",
                "target": "angina",
                "direction": "increase",
                "ceiling": {"monetary": "low", "risk": "low", "discomfort": "low"},
            },
        ),
    )
    print(
        "Every plan is a minimal set of still-unobserved findings; the engine"
        " also names the actions that would supply them and the combined cost."
    )

    # focus: filter nodes by their control parameters.
    propagate(network, {"substernal-pain": "present"})
    show(
        "focus: which hypotheses are triggered by chest pain alone?",
        execute_query(network, {"class": "focus", "kind": "hypothesis", "expression": "triggered"}),
    )

    # effect: who could this finding influence?
    propagate(network, {})
    show(
        "effect (syntactic): everything pain-after-eating could ever touch",
        execute_query(network, {"class": "effect", "finding": "pain-after-eating", "mode": "syntactic"}),
    )
    propagate(network, {"substernal-pain": "absent"})
    show(
        "effect (semantic): what it can still change once pain is absent",
        execute_query(network, {"class": "effect", "finding": "pain-after-eating", "mode": "semantic"}),
    )
    print(
        "With substernal pain absent, the postprandial cluster can no longer"
        " confirm, so the finding's actual influence shrinks below its"
        " link-reachability."
    )

    # discriminate: what tells two hypotheses apart?
    propagate(network, {})
    show(
        "discriminate: what separates angina from esophageal spasm?",
        execute_query(
            network,
            {"class": "discriminate", "first": "angina", "second": "esophageal-spasm"},
        ),
    )
    print(
        "These findings and clusters can move the two hypotheses in opposite"
        " directions, so observing them is informative either way."
    )


if __name__ == "__main__":
    main()
