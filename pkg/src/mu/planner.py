"""The consultation control loop: focus, act, incorporate, repeat.

Each cycle establishes a focus of attention among the unresolved hypotheses,
gathers the actions that are legal and still informative, picks the cheapest
useful one under the control strategy, and folds its outcome back into the
network. The loop ends when nothing is in focus, nothing useful remains, or
the cycle limit trips, and the whole run is captured as a
:class:`SessionTrace` suitable for audit or replay.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .actions import ActionSpec, Strategy
from .exprs import eval_expr
from .levels import BeliefLevel
from .network import (
    InconsistentEvidenceError,
    Network,
    NodeKind,
    PropagationResult,
    propagate,
)

#: Terminal dispositions of a workup.
CONFIRMED_SET = "confirmed-set"
DISCONFIRMED_SET = "disconfirmed-set"
NO_USEFUL_ACTION = "no-useful-action"


class EmptyCandidatesError(ValueError):
    """choose_action was handed nothing to choose from."""


class ObservationOutsideYieldsError(ValueError):
    """Recorded values must come from the performed action's yields."""

    def __init__(self, action_id: str, message: str):
        self.action_id = action_id
        super().__init__(f"{action_id}: {message}")


@dataclass(frozen=True)
class FocusChoice:
    """The hypothesis currently under investigation and why."""

    node_id: str
    tier: str  # "critical" | "triggered-dangerous" | "triggered"
    rationale: str


@dataclass(frozen=True)
class TraceEntry:
    """One completed cycle of the control loop."""

    cycle: int
    focus: FocusChoice | None
    candidates: tuple[tuple[str, int], ...]  # (action id, score)
    action_id: str
    observed: dict[str, str]
    diff: tuple[tuple[str, BeliefLevel, BeliefLevel], ...]


@dataclass
class SessionTrace:
    """Ordered record of a workup: presenting evidence, cycles, outcome."""

    presenting: dict[str, str] = field(default_factory=dict)
    entries: list[TraceEntry] = field(default_factory=list)
    disposition: str | None = None
    resolved: tuple[str, ...] = ()
    cycle_limit_hit: bool = False

    def action_ids(self) -> list[str]:
        return [entry.action_id for entry in self.entries]

    def begin_cycle(
        self, focus: FocusChoice | None, candidates: tuple[tuple[str, int], ...]
    ) -> None:
        self._pending = (focus, candidates)

    def _take_pending(self) -> tuple[FocusChoice | None, tuple[tuple[str, int], ...]]:
        pending = getattr(self, "_pending", (None, ()))
        self._pending = (None, ())
        return pending


@dataclass(frozen=True)
class PatientModel:
    """A simulated patient: fixed answers, stable across repeated questions.

    Findings absent from ``answers`` are unanswerable and stay unknown.
    """

    answers: dict[str, object] = field(default_factory=dict)

    def answer(self, finding_id: str) -> object | None:
        return self.answers.get(finding_id)


def select_focus(network: Network) -> FocusChoice | None:
    """Pick the hypothesis most deserving of attention, if any.

    Tiers: critical beats triggered-and-dangerous beats triggered; already
    resolved hypotheses (confirmed or disconfirmed) are skipped so attention
    moves on. Ties break by higher belief rank, then declaration order.
    """
    tiers: tuple[list[tuple[int, str, str]], ...] = ([], [], [])
    for node in network.hypotheses():
        belief = network.beliefs[node.id]
        if belief in (BeliefLevel.CONFIRMED, BeliefLevel.DISCONFIRMED):
            continue
        params = network.node_params(node.id)
        triggered = bool(params.get("triggered"))
        dangerous = bool(params.get("dangerous"))
        rationale = (
            f"belief={belief.label} triggered={str(triggered).lower()} "
            f"dangerous={str(dangerous).lower()}"
        )
        if params.get("critical") is True:
            tiers[0].append((belief.rank, node.id, f"critical: {rationale}"))
        elif triggered and dangerous:
            tiers[1].append((belief.rank, node.id, rationale))
        elif triggered:
            tiers[2].append((belief.rank, node.id, rationale))
    for tier_name, bucket in zip(
        ("critical", "triggered-dangerous", "triggered"), tiers
    ):
        if bucket:
            bucket.sort(
                key=lambda item: (-item[0], network.declaration_order[item[1]])
            )
            _, node_id, rationale = bucket[0]
            return FocusChoice(node_id=node_id, tier=tier_name, rationale=rationale)
    return None


def candidate_actions(
    network: Network, focus: str, history: set[str] | frozenset[str] = frozenset()
) -> list[tuple[ActionSpec, int]]:
    """Legal, relevant, still-informative actions with their score.

    An action qualifies when it has not been performed (unless repeatable),
    its preconditions hold, at least one yielded finding syntactically
    affects the focus, and it has positive marginal utility: some joint
    outcome of its unobserved yields changes the belief of a node they
    reach. The score is the largest focus-belief rank change any outcome
    could produce, an upper bound used for tie-breaking.
    """
    network.node(focus)
    results: list[tuple[ActionSpec, int]] = []
    for action in network.actions.values():
        if action.id in history and not action.repeatable:
            continue
        if not _preconditions_hold(network, action):
            continue
        if not any(
            focus in network.reachable_from(yielded) for yielded in action.yields
        ):
            continue
        unobserved = [
            yielded
            for yielded in action.yields
            if yielded not in network.observations
        ]
        if not unobserved:
            continue
        useful, score = _marginal_utility(network, focus, unobserved)
        if not useful:
            continue
        results.append((action, score))
    return results


def _preconditions_hold(network: Network, action: ActionSpec) -> bool:
    return all(
        eval_expr(pre.expression, network.node_params(pre.node))
        for pre in action.preconditions
    )


def _marginal_utility(
    network: Network, focus: str, unobserved: list[str]
) -> tuple[bool, int]:
    """Whether outcomes of the unobserved yields can change anything reached.

    Outcomes are evaluated against the otherwise-current observation set;
    contradictory outcomes are not counted. Also returns the best absolute
    focus rank change over the outcomes.
    """
    reached: set[str] = set()
    for yielded in unobserved:
        reached |= network.reachable_from(yielded)
        reached.add(yielded)
    current = network.beliefs
    focus_rank = current[focus].rank
    domains = [
        network.nodes[yielded].domain.values  # type: ignore[union-attr]
        for yielded in unobserved
    ]
    useful = False
    best = 0
    base = dict(network.observations)
    for combo in itertools.product(*domains):
        values = base.copy()
        values.update(zip(unobserved, combo))
        try:
            beliefs = network.beliefs_for(values)
        except InconsistentEvidenceError:
            continue
        if not useful and any(
            beliefs[node_id] is not current[node_id] for node_id in reached
        ):
            useful = True
        best = max(best, abs(beliefs[focus].rank - focus_rank))
    return useful, best


def choose_action(
    candidates: list[tuple[ActionSpec, int]], strategy: Strategy
) -> ActionSpec:
    """Cheapest candidate under the strategy's cost priority.

    Cost is compared lexicographically dimension by dimension; equal-cost
    candidates are split by the larger potential focus change, then by
    declaration order (candidate lists arrive in declaration order and the
    sort is stable).
    """
    if not candidates:
        raise EmptyCandidatesError("no candidate actions to choose from")
    priority = strategy.cost_priority
    ranked = sorted(
        candidates,
        key=lambda pair: (pair[0].cost.sort_key(priority), -pair[1]),
    )
    return ranked[0][0]


def record_outcome(
    network: Network,
    action: ActionSpec,
    observed: dict[str, object],
    trace: SessionTrace,
) -> PropagationResult:
    """Fold an action's observed findings into the network and the trace."""
    stray = set(observed) - set(action.yields)
    if stray:
        raise ObservationOutsideYieldsError(
            action.id, f"observed findings outside yields: {sorted(stray)}"
        )
    merged = dict(network.observations)
    merged.update(observed)
    result = propagate(network, merged)
    focus, candidates = trace._take_pending()
    trace.entries.append(
        TraceEntry(
            cycle=len(trace.entries) + 1,
            focus=focus,
            candidates=candidates,
            action_id=action.id,
            observed={
                finding: network.observations[finding] for finding in observed
            },
            diff=result.diff,
        )
    )
    return result


def run_workup(
    network: Network,
    patient: PatientModel,
    strategy: Strategy | None = None,
    cycle_limit: int = 50,
) -> SessionTrace:
    """Drive the control loop against a simulated patient to a disposition."""
    if cycle_limit < 1:
        raise ValueError("cycle_limit must be at least 1")
    strategy = strategy or network.strategy
    trace = SessionTrace()

    presenting = {
        finding: patient.answer(finding)
        for finding in strategy.presenting
        if patient.answer(finding) is not None
    }
    if presenting:
        merged = dict(network.observations)
        merged.update(presenting)
        propagate(network, merged)
        trace.presenting = dict(network.observations)

    performed: set[str] = set()
    for _ in range(cycle_limit):
        focus = select_focus(network)
        if focus is None:
            break
        candidates = candidate_actions(network, focus.node_id, performed)
        if not candidates:
            break
        action = choose_action(candidates, strategy)
        observed = {
            finding: patient.answer(finding)
            for finding in action.yields
            if patient.answer(finding) is not None
        }
        performed.add(action.id)
        trace.begin_cycle(
            focus, tuple((spec.id, score) for spec, score in candidates)
        )
        record_outcome(network, action, observed, trace)
    else:
        trace.cycle_limit_hit = True

    confirmed = [
        node.id
        for node in network.hypotheses()
        if network.beliefs[node.id] is BeliefLevel.CONFIRMED
    ]
    disconfirmed = [
        node.id
        for node in network.hypotheses()
        if network.beliefs[node.id] is BeliefLevel.DISCONFIRMED
    ]
    if confirmed:
        trace.disposition = CONFIRMED_SET
        trace.resolved = tuple(confirmed)
    elif disconfirmed:
        trace.disposition = DISCONFIRMED_SET
        trace.resolved = tuple(disconfirmed)
    else:
        trace.disposition = NO_USEFUL_ACTION
    return trace
