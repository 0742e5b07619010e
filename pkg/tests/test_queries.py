"""Query engine: state, change, focus, effect, discriminate."""

from __future__ import annotations

import itertools
import random

import pytest

from genkb import random_network
from helpers import naive_or_none
from mu.bundled import bundled_network
from mu.kblang import parse_expression
from mu.levels import BeliefLevel, CostGrade, CostVector
from mu.network import (
    InconsistentEvidenceError,
    NodeKind,
    UnknownNodeError,
    propagate,
)
from mu.queries import (
    InvalidQueryError,
    NodePredicate,
    StateSpaceTooLargeError,
    UnknownParameterError,
    completion_count,
    context_space_size,
    oracle_enumerate,
    query_change,
    query_discriminate,
    query_effect,
    query_focus,
    query_state,
)

FREE = CostVector(CostGrade.FREE, CostGrade.FREE, CostGrade.FREE)
LOW = CostVector(CostGrade.LOW, CostGrade.LOW, CostGrade.LOW)


def observed(network, **overrides):
    base = {
        "age": 50,
        "sex": "male",
        "ekg-result": "normal",
        "during-episode": False,
        "therapy-response": "unchanged",
        "stress-test-result": "negative",
    }
    base.update(overrides)
    propagate(network, base)
    return network


class TestState:
    def test_node_parameters(self, network):
        propagate(network, {"age": 30, "sex": "male"})
        assert query_state(network, "angina", "belief") is BeliefLevel.UNKNOWN
        assert query_state(network, "angina", "dangerous") is True
        assert query_state(network, "age", "observed") is True
        assert query_state(network, "sex", "belief") is BeliefLevel.CONFIRMED

    def test_action_parameters(self, network):
        assert query_state(network, "ekg", "kind") == "test"
        assert query_state(network, "ekg", "monetary") is CostGrade.LOW
        assert query_state(network, "ekg", "risk") is CostGrade.FREE
        assert query_state(network, "ekg", "repeatable") is False

    def test_unknown_parameter_and_subject(self, network):
        with pytest.raises(UnknownParameterError):
            query_state(network, "angina", "weight")
        with pytest.raises(UnknownParameterError):
            query_state(network, "ekg", "belief")
        with pytest.raises(UnknownNodeError):
            query_state(network, "no-such-thing", "belief")


class TestChange:
    def test_blank_increase_plans_are_exactly_the_minimal_frontier(self, network):
        propagate(network, {})
        plans = query_change(network, "angina", "increase")
        summary = [
            (p.assignments, p.resulting_belief.label, p.rank_change, p.supplying_actions)
            for p in plans
        ]
        assert summary == [
            (
                (("during-episode", "true"), ("ekg-result", "ischemic-changes")),
                "confirmed",
                3,
                ("ekg",),
            ),
            ((("angiogram-result", "positive"),), "confirmed", 3, ("angiogram",)),
            (
                (("therapy-response", "abated"),),
                "strongly-supported",
                2,
                ("trial-therapy",),
            ),
            (
                (("stress-test-result", "severe"),),
                "strongly-supported",
                2,
                ("stress-test",),
            ),
            (
                (("age", "40-to-60"), ("sex", "male")),
                "supported",
                1,
                ("ask-age", "ask-sex"),
            ),
            ((("age", "over-60"),), "supported", 1, ("ask-age",)),
            (
                (("pain-after-eating", "false"), ("substernal-pain", "present")),
                "supported",
                1,
                ("ask-episode",),
            ),
        ]

    def test_cost_is_the_pointwise_maximum_over_supplying_actions(self, network):
        propagate(network, {})
        plans = query_change(network, "angina", "increase")
        by_assignments = {p.assignments: p for p in plans}
        ekg_plan = by_assignments[
            (("during-episode", "true"), ("ekg-result", "ischemic-changes"))
        ]
        # A single action yields both findings; no summing happens.
        assert ekg_plan.cost.to_dict() == {
            "monetary": "low",
            "risk": "free",
            "discomfort": "low",
        }

    def test_each_plan_is_strictly_minimal(self, network):
        propagate(network, {})
        current = network.beliefs["angina"].rank
        for plan in query_change(network, "angina", "increase"):
            full = dict(plan.assignments)
            assert network.beliefs_for(full)["angina"].rank > current
            for dropped in plan.assignments:
                reduced = {k: v for k, v in plan.assignments if (k, v) != dropped}
                try:
                    beliefs = network.beliefs_for(reduced)
                except InconsistentEvidenceError:
                    continue
                assert beliefs["angina"].rank <= current

    def test_confirmed_target_has_no_increase_plans(self, network):
        propagate(network, {"angiogram-result": "positive"})
        assert query_change(network, "angina", "increase") == []

    def test_decrease_plans(self, network):
        propagate(network, {})
        plans = query_change(network, "esophageal-spasm", "decrease")
        assert [(p.assignments, p.resulting_belief.label) for p in plans] == [
            ((("episode-pattern", "exertional"),), "detracted"),
            ((("pain-after-eating", "false"),), "detracted"),
        ]
        assert all(p.rank_change == -1 for p in plans)

    def test_ceiling_filters_by_every_dimension(self, network):
        propagate(network, {})
        capped = query_change(network, "angina", "increase", ceiling=FREE)
        assert {p.supplying_actions for p in capped} == {
            ("ask-age", "ask-sex"),
            ("ask-age",),
            ("ask-episode",),
        }
        low = query_change(network, "angina", "increase", ceiling=LOW)
        assert (("during-episode", "true"), ("ekg-result", "ischemic-changes")) in {
            p.assignments for p in low
        }
        assert all(p.cost.fits_within(LOW) for p in low)

    def test_invalid_targets_and_directions(self, network):
        with pytest.raises(InvalidQueryError):
            query_change(network, "age", "increase")
        with pytest.raises(InvalidQueryError):
            query_change(network, "angina", "sideways")
        with pytest.raises(UnknownNodeError):
            query_change(network, "ghost", "increase")

    def test_oversized_state_space_is_refused(self, network):
        propagate(network, {})
        with pytest.raises(StateSpaceTooLargeError) as excinfo:
            query_change(network, "angina", "increase", bound=10)
        assert excinfo.value.size == 3456
        assert excinfo.value.bound == 10


class TestFocus:
    def make_spasm_state(self, network):
        propagate(
            network,
            {
                "substernal-pain": "present",
                "pain-after-eating": True,
                "episode-pattern": "atypical",
                "age": 50,
                "sex": "male",
            },
        )
        return network

    def test_kind_and_expression(self, network):
        self.make_spasm_state(network)
        triggered = query_focus(
            network,
            NodePredicate(
                kind=NodeKind.HYPOTHESIS, expression=parse_expression("triggered")
            ),
        )
        assert triggered == {"angina", "esophageal-spasm"}
        strong_clusters = query_focus(
            network,
            NodePredicate(
                kind=NodeKind.CLUSTER,
                expression=parse_expression("belief at-least supported"),
            ),
        )
        assert strong_clusters == {
            "angina-risk-factors",
            "classic-anginal-episode",
            "postprandial",
        }

    def test_structural_filters(self, network):
        assert query_focus(network, NodePredicate(supports="angina")) == {
            "angina-risk-factors",
            "angiogram-result",
            "classic-anginal-episode",
            "ischemic-ekg-during-episode",
            "severe-cad-on-stress-test",
            "therapy-response",
        }
        assert query_focus(network, NodePredicate(detracts="angina")) == {
            "angina-risk-factors",
            "angiogram-result",
            "classic-anginal-episode",
            "postprandial",
            "therapy-response",
        }

    def test_empty_predicate_matches_every_node(self, network):
        assert query_focus(network, NodePredicate()) == set(network.nodes)

    def test_unknown_names_are_rejected(self, network):
        with pytest.raises(UnknownNodeError):
            query_focus(network, NodePredicate(supports="ghost"))
        with pytest.raises(UnknownParameterError):
            query_focus(
                network,
                NodePredicate(
                    kind=NodeKind.HYPOTHESIS, expression=parse_expression("weight")
                ),
            )


class TestEffect:
    def test_syntactic_mode_is_link_reachability(self, network):
        assert query_effect(network, "pain-after-eating", "syntactic") == {
            "postprandial",
            "angina",
            "esophageal-spasm",
        }
        assert query_effect(network, "substernal-pain", "syntactic") == {
            "postprandial",
            "classic-anginal-episode",
            "angina",
            "esophageal-spasm",
        }

    def test_semantic_mode_drops_unreachable_influence(self, network):
        propagate(network, {})
        # Over complete worlds the conclusive finding pins the hypothesis,
        # so upstream findings cannot change it in any completion pair.
        assert query_effect(network, "pain-after-eating", "semantic") == {
            "postprandial",
            "esophageal-spasm",
        }
        assert query_effect(network, "substernal-pain", "semantic") == {
            "postprandial",
            "classic-anginal-episode",
            "esophageal-spasm",
        }

    def test_semantic_respects_current_observations(self, network):
        propagate(network, {"angiogram-result": "positive"})
        assert query_effect(network, "ekg-result", "syntactic") == {
            "ischemic-ekg-during-episode",
            "angina",
        }
        assert query_effect(network, "ekg-result", "semantic") == {
            "ischemic-ekg-during-episode"
        }

    def test_semantic_is_a_subset_of_syntactic(self, network):
        propagate(network, {})
        for finding in network.findings():
            semantic = query_effect(network, finding.id, "semantic")
            assert semantic <= query_effect(network, finding.id, "syntactic")

    def test_semantic_agrees_with_an_independent_enumeration(self, network):
        propagate(network, {})
        finding = network.nodes["pain-after-eating"]
        others = [n for n in network.findings() if n.id != finding.id]
        affected = set()
        for combo in itertools.product(*(n.domain.values for n in others)):
            context = dict(zip([n.id for n in others], combo))
            rows = []
            for value in finding.domain.values:
                context[finding.id] = value
                beliefs = naive_or_none(network, dict(context))
                if beliefs is not None:
                    rows.append(beliefs)
            for one, two in itertools.combinations(rows, 2):
                affected |= {
                    node_id
                    for node_id in network.nodes
                    if node_id != finding.id and one[node_id] is not two[node_id]
                }
        assert query_effect(network, finding.id, "semantic") == affected

    def test_invalid_inputs(self, network):
        with pytest.raises(InvalidQueryError):
            query_effect(network, "postprandial")
        with pytest.raises(InvalidQueryError):
            query_effect(network, "age", mode="psychic")
        with pytest.raises(StateSpaceTooLargeError):
            query_effect(network, "age", "semantic", bound=10)


class TestDiscriminate:
    FULL = {"episode-pattern", "pain-after-eating", "postprandial", "substernal-pain"}

    def test_blank_network_falls_back_to_the_heuristic(self, network):
        propagate(network, {})
        assert context_space_size(network) > 4096
        assert query_discriminate(network, "angina", "esophageal-spasm") == self.FULL
        with pytest.raises(StateSpaceTooLargeError):
            query_discriminate(network, "angina", "esophageal-spasm", mode="semantic")

    def test_small_context_space_is_checked_exactly(self, network):
        observed(network)
        assert context_space_size(network) == 108
        result = query_discriminate(network, "angina", "esophageal-spasm")
        assert result == self.FULL
        assert (
            query_discriminate(network, "angina", "esophageal-spasm", mode="semantic")
            == result
        )

    def test_semantic_mode_can_prune_the_heuristic(self, network):
        observed(network, **{"episode-pattern": "exertional"})
        # The competitor is pinned by the observed pattern; only re-asking
        # that finding could still split the pair.
        semantic = query_discriminate(network, "angina", "esophageal-spasm")
        assert semantic == {"episode-pattern"}
        heuristic = query_discriminate(
            network, "angina", "esophageal-spasm", mode="heuristic"
        )
        assert semantic < heuristic

    def test_symmetric_and_irreflexive(self, network):
        propagate(network, {})
        one = query_discriminate(network, "angina", "esophageal-spasm")
        two = query_discriminate(network, "esophageal-spasm", "angina")
        assert one == two
        assert query_discriminate(network, "angina", "angina") == set()

    def test_only_hypotheses_qualify(self, network):
        with pytest.raises(InvalidQueryError):
            query_discriminate(network, "angina", "postprandial")
        with pytest.raises(InvalidQueryError):
            query_discriminate(network, "angina", "esophageal-spasm", mode="tarot")


class TestOracleEnumerate:
    def test_blank_table_covers_the_consistent_worlds(self, network):
        propagate(network, {})
        assert completion_count(network) == 3456
        table = oracle_enumerate(network, "angina")
        assert len(table) == 2256
        # The conclusive finding appears in every completion, so the target
        # is never left in an intermediate state.
        assert {level.label for level in table.values()} == {
            "confirmed",
            "disconfirmed",
        }

    def test_observations_shrink_the_table(self, network):
        propagate(network, {"angiogram-result": "negative", "age": 30})
        table = oracle_enumerate(network, "angina")
        assert len(table) <= 576
        assert {level.label for level in table.values()} == {"disconfirmed"}

    def test_bound_is_enforced(self, network):
        propagate(network, {})
        with pytest.raises(StateSpaceTooLargeError):
            oracle_enumerate(network, "angina", bound=100)


class TestRandomNetworkEquivalence:
    """query_change agrees with a brute-force minimal-plan search."""

    @pytest.mark.parametrize("seed", range(12))
    def test_change_plans_match_brute_force(self, seed):
        rng = random.Random(seed)
        network = random_network(rng)
        hypothesis = network.hypotheses()[0].id
        direction = rng.choice(["increase", "decrease"])
        sign = 1 if direction == "increase" else -1
        current = network.beliefs[hypothesis].rank

        unobserved = [n for n in network.findings()]
        hits = []
        for width in range(1, len(unobserved) + 1):
            for group in itertools.combinations(unobserved, width):
                for combo in itertools.product(*(n.domain.values for n in group)):
                    pairs = frozenset(zip([n.id for n in group], combo))
                    beliefs = naive_or_none(network, dict(pairs))
                    if beliefs is None:
                        continue
                    if (beliefs[hypothesis].rank - current) * sign > 0:
                        hits.append(pairs)
        expected = {
            tuple(sorted(p)) for p in hits if not any(q < p for q in hits)
        }

        plans = query_change(network, hypothesis, direction)
        assert {p.assignments for p in plans} == expected
