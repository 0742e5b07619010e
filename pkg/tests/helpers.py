"""Shared test fixtures: canonical patients and an independent evaluator.

``naive_beliefs`` is a deliberately separate implementation of the
propagation semantics — recursive descent over the combining rules, no
topological order, no link table — used as an oracle against the engine.
"""

from __future__ import annotations

import itertools

from mu.levels import BeliefLevel
from mu.network import Network, NodeKind, ValueAtom

CLASSIC_PATIENT = {
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

RULEOUT_PATIENT = {
    "substernal-pain": "present",
    "pain-after-eating": False,
    "episode-pattern": "atypical",
    "age": 35,
    "sex": "female",
}

SPASM_PATIENT = {
    "substernal-pain": "present",
    "pain-after-eating": True,
    "episode-pattern": "atypical",
    "age": 50,
    "sex": "male",
}


class Inconsistent(Exception):
    """Oracle marker for simultaneous confirming and disconfirming evidence."""


def naive_beliefs(network: Network, values: dict[str, str]) -> dict[str, BeliefLevel]:
    """Independent recursive evaluation over normalized observation labels."""
    memo: dict[str, BeliefLevel] = {}

    def level_of(node_id: str) -> BeliefLevel:
        if node_id not in memo:
            memo[node_id] = compute(node_id)
        return memo[node_id]

    def holds(atom) -> bool:
        if isinstance(atom, ValueAtom):
            return values.get(atom.source) == atom.value
        actual = level_of(atom.source)
        if atom.mode.value == "at-least":
            return actual.rank >= atom.bound.rank
        return actual.rank <= atom.bound.rank

    def compute(node_id: str) -> BeliefLevel:
        node = network.nodes[node_id]
        if node.kind is NodeKind.FINDING:
            value = values.get(node_id)
            if value is None:
                return BeliefLevel.UNKNOWN
            if set(node.domain.values) in ({"true", "false"}, {"present", "absent"}):
                if value in ("true", "present"):
                    return BeliefLevel.CONFIRMED
                return BeliefLevel.DISCONFIRMED
            return BeliefLevel.CONFIRMED
        matched = [
            rule for rule in node.rules if all(holds(atom) for atom in rule.atoms)
        ]
        outputs = [rule.output for rule in matched]
        confirms = BeliefLevel.CONFIRMED in outputs
        disconfirms = BeliefLevel.DISCONFIRMED in outputs
        if confirms and disconfirms:
            raise Inconsistent(node_id)
        if confirms:
            return BeliefLevel.CONFIRMED
        if disconfirms:
            return BeliefLevel.DISCONFIRMED
        if matched:
            return matched[0].output
        return BeliefLevel.UNKNOWN

    return {node_id: level_of(node_id) for node_id in network.nodes}


def naive_or_none(network: Network, values: dict[str, str]):
    try:
        return naive_beliefs(network, values)
    except Inconsistent:
        return None


def unobserved(network: Network) -> list[str]:
    return [
        node_id
        for node_id in network.declaration_order
        if network.nodes[node_id].kind is NodeKind.FINDING
        and node_id not in network.observations
    ]


def all_partials(network: Network, finding_ids: list[str]):
    """Every partial assignment over the given findings, smallest first."""
    for width in range(len(finding_ids) + 1):
        for subset in itertools.combinations(finding_ids, width):
            domains = [network.nodes[f].domain.values for f in subset]
            for combo in itertools.product(*domains):
                yield dict(zip(subset, combo))


def all_completions(network: Network, finding_ids: list[str]):
    """Every full assignment over the given findings."""
    domains = [network.nodes[f].domain.values for f in finding_ids]
    for combo in itertools.product(*domains):
        yield dict(zip(finding_ids, combo))
