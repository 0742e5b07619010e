"""The five classes of control-state questions, plus the brute-force oracle.

Everything here is read-only with respect to the network's consultation
state: queries inspect the current beliefs and parameters, and enumeration
runs against value maps built on the side rather than by re-propagating.

The oracle (:func:`oracle_enumerate`) exhaustively tabulates a node's belief
over every completion of the currently unobserved findings. It doubles as
the reference semantics for change, effect, and discrimination queries: those
run exact ("semantic") when the completion space fits the oracle bound and
fall back to structural heuristics otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .actions import ActionSpec
from .exprs import Expr, ParamValue, UnboundParameterError, eval_expr
from .levels import (
    BeliefLevel,
    CostVector,
    DOWNWARD_ROLES,
    UNBOUNDED_COST,
    UPWARD_ROLES,
)
from .network import (
    InconsistentEvidenceError,
    Network,
    NodeKind,
    NodeSpec,
    UnknownNodeError,
)

#: Default ceiling on completion-space size for exact query answers.
ORACLE_BOUND = 4096

#: A full assignment of the unobserved findings, as ordered (id, value) pairs.
Assignment = tuple[tuple[str, str], ...]


def _beliefs_or_none(network: Network, values: dict[str, str]):
    """Belief map for a hypothetical world, or None if it is contradictory.

    Enumeration-based queries range over representable worlds; a completion
    whose evidence is inconsistent (simultaneous confirm and disconfirm) is
    not a reachable consultation state and is skipped rather than reported.
    """
    try:
        return network.beliefs_for(values)
    except InconsistentEvidenceError:
        return None


class StateSpaceTooLargeError(RuntimeError):
    """The completion space exceeds the configured oracle bound."""

    def __init__(self, size: int, bound: int):
        self.size = size
        self.bound = bound
        super().__init__(
            f"state space of {size} completions exceeds the oracle bound {bound}"
        )


class UnknownParameterError(KeyError):
    """A query referenced a parameter not defined for the node."""

    def __init__(self, subject: str, parameter: str):
        self.subject = subject
        self.parameter = parameter
        super().__init__(f"no parameter {parameter!r} on {subject!r}")


class InvalidQueryError(ValueError):
    """The query is malformed (wrong node kind, direction, or mode)."""


@dataclass(frozen=True)
class ChangePlan:
    """One minimal way to move a target node's belief.

    ``assignments`` is a value per currently-unobserved finding, minimal in
    the set-inclusion sense: dropping any one of them no longer changes the
    target's belief rank in the requested direction. ``supplying_actions``
    is a cheapest minimal set of actions that together yield every assigned
    finding, and ``cost`` is the per-dimension maximum over those actions
    (dimensions are never summed or collapsed).
    """

    assignments: Assignment
    resulting_belief: BeliefLevel
    rank_change: int
    supplying_actions: tuple[str, ...]
    cost: CostVector


@dataclass(frozen=True)
class NodePredicate:
    """Filter for focusing questions: kind, parameter expression, structure.

    ``supports``/``detracts`` restrict to nodes with a direct evidence link
    of an upward (resp. downward) role into the named target.
    """

    kind: NodeKind | None = None
    expression: Expr | None = None
    supports: str | None = None
    detracts: str | None = None


# -- state --------------------------------------------------------------------


def query_state(network: Network, subject: str, parameter: str) -> ParamValue:
    """Current value of one parameter on a node or an action."""
    action = network.actions.get(subject)
    if action is not None:
        params = _action_params(action)
        if parameter not in params:
            raise UnknownParameterError(subject, parameter)
        return params[parameter]
    params = network.node_params(subject)  # raises UnknownNodeError
    if parameter not in params:
        raise UnknownParameterError(subject, parameter)
    return params[parameter]


def _action_params(action: ActionSpec) -> dict[str, ParamValue]:
    return {
        "kind": action.kind.value,
        "monetary": action.cost.monetary,
        "risk": action.cost.risk,
        "discomfort": action.cost.discomfort,
        "repeatable": action.repeatable,
    }


# -- oracle -------------------------------------------------------------------


def unobserved_findings(network: Network) -> list[NodeSpec]:
    """Findings with no current observation, in declaration order."""
    return [
        node
        for node in network.nodes.values()
        if node.kind is NodeKind.FINDING and node.id not in network.observations
    ]


def completion_count(network: Network) -> int:
    """Number of full completions of the unobserved findings."""
    return math.prod(
        len(node.domain.values)
        for node in unobserved_findings(network)
        if node.domain is not None
    )


def oracle_enumerate(
    network: Network, target: str, bound: int = ORACLE_BOUND
) -> dict[Assignment, BeliefLevel]:
    """Exhaustive table of the target's belief over all completions.

    Raises :class:`StateSpaceTooLargeError` when the completion space
    exceeds ``bound``, signalling callers to use a heuristic mode instead.
    """
    network.node(target)
    unobserved = unobserved_findings(network)
    size = completion_count(network)
    if size > bound:
        raise StateSpaceTooLargeError(size, bound)

    names = [node.id for node in unobserved]
    domains = [node.domain.values for node in unobserved if node.domain is not None]
    base = dict(network.observations)
    table: dict[Assignment, BeliefLevel] = {}
    for combo in itertools.product(*domains):
        values = base.copy()
        values.update(zip(names, combo))
        beliefs = _beliefs_or_none(network, values)
        if beliefs is not None:
            table[tuple(zip(names, combo))] = beliefs[target]
    return table


# -- change -------------------------------------------------------------------


def query_change(
    network: Network,
    target: str,
    direction: str = "increase",
    ceiling: CostVector | None = None,
    bound: int = ORACLE_BOUND,
) -> list[ChangePlan]:
    """Minimal assignment plans that strictly move the target's belief.

    Returns exactly the set-inclusion-minimal partial assignments over the
    currently-unobserved findings whose propagation strictly raises
    (``increase``) or lowers (``decrease``) the target's belief rank, each
    with the cheapest action set that can supply it. Plans are sorted by
    absolute rank change descending, then cost ascending under the
    strategy's cost priority.
    """
    node = network.node(target)
    if node.kind is NodeKind.FINDING:
        raise InvalidQueryError("change queries target a cluster or hypothesis")
    if direction not in ("increase", "decrease"):
        raise InvalidQueryError(f"not a direction: {direction!r}")
    size = completion_count(network)
    if size > bound:
        raise StateSpaceTooLargeError(size, bound)

    sign = 1 if direction == "increase" else -1
    current = network.beliefs[target].rank
    unobserved = unobserved_findings(network)
    base = dict(network.observations)

    accepted: list[tuple[frozenset[tuple[str, str]], BeliefLevel]] = []
    for width in range(1, len(unobserved) + 1):
        for group in itertools.combinations(unobserved, width):
            ids = [node.id for node in group]
            for combo in itertools.product(
                *(node.domain.values for node in group if node.domain is not None)
            ):
                pairs = frozenset(zip(ids, combo))
                # A plan containing an already-found plan is never minimal.
                if any(found <= pairs for found, _ in accepted):
                    continue
                values = base.copy()
                values.update(zip(ids, combo))
                beliefs = _beliefs_or_none(network, values)
                if beliefs is None:
                    continue
                level = beliefs[target]
                if (level.rank - current) * sign > 0:
                    accepted.append((pairs, level))

    plans = []
    for pairs, level in accepted:
        assignments = tuple(sorted(pairs))
        supplying, cost = _supplying_actions(network, [fid for fid, _ in assignments])
        plan = ChangePlan(
            assignments=assignments,
            resulting_belief=level,
            rank_change=level.rank - current,
            supplying_actions=supplying,
            cost=cost,
        )
        if ceiling is None or plan.cost.fits_within(ceiling):
            plans.append(plan)

    priority = network.strategy.cost_priority
    plans.sort(
        key=lambda p: (-abs(p.rank_change), p.cost.sort_key(priority), p.assignments)
    )
    return plans


def _supplying_actions(
    network: Network, finding_ids: list[str]
) -> tuple[tuple[str, ...], CostVector]:
    """Cheapest minimal action set yielding all the given findings."""
    needed = set(finding_ids)
    relevant = [
        action for action in network.actions.values() if needed & set(action.yields)
    ]
    priority = network.strategy.cost_priority
    best: tuple | None = None
    for width in range(1, len(relevant) + 1):
        for subset in itertools.combinations(relevant, width):
            yielded = set().union(*(action.yields for action in subset))
            if not needed <= yielded:
                continue
            cost = subset[0].cost
            for action in subset[1:]:
                cost = cost.max_with(action.cost)
            order = tuple(network.action_order[action.id] for action in subset)
            key = (cost.sort_key(priority), order)
            if best is None or key < best[0]:
                best = (key, tuple(action.id for action in subset), cost)
        if best is not None:
            break
    if best is None:
        return (), UNBOUNDED_COST
    return best[1], best[2]


# -- focus --------------------------------------------------------------------


def query_focus(network: Network, predicate: NodePredicate) -> set[str]:
    """Node ids of the filtered kind satisfying the predicate right now."""
    for target in (predicate.supports, predicate.detracts):
        if target is not None:
            network.node(target)
    matched: set[str] = set()
    for node in network.nodes.values():
        if predicate.kind is not None and node.kind is not predicate.kind:
            continue
        if predicate.supports is not None and not _has_direct_role(
            network, node.id, predicate.supports, UPWARD_ROLES
        ):
            continue
        if predicate.detracts is not None and not _has_direct_role(
            network, node.id, predicate.detracts, DOWNWARD_ROLES
        ):
            continue
        if predicate.expression is not None:
            try:
                holds = eval_expr(predicate.expression, network.node_params(node.id))
            except UnboundParameterError as exc:
                raise UnknownParameterError(node.id, exc.name) from None
            if not holds:
                continue
        matched.add(node.id)
    return matched


def _has_direct_role(
    network: Network, source: str, target: str, roles: frozenset
) -> bool:
    return any(
        link.target == target and link.role in roles
        for link in network.successors[source]
    )


# -- effect -------------------------------------------------------------------


def query_effect(
    network: Network,
    finding_id: str,
    mode: str = "syntactic",
    bound: int = ORACLE_BOUND,
) -> set[str]:
    """Nodes whose belief the finding can influence.

    Syntactic mode answers by link reachability (cheap, sound
    over-approximation). Semantic mode answers exactly: a node is affected
    iff two completions of the current observations that differ only in
    this finding give it different beliefs.
    """
    node = network.node(finding_id)
    if node.kind is not NodeKind.FINDING:
        raise InvalidQueryError("effect queries take a finding")
    if mode not in ("syntactic", "semantic"):
        raise InvalidQueryError(f"not an effect mode: {mode!r}")
    reachable = network.reachable_from(finding_id)
    if mode == "syntactic":
        return reachable

    assert node.domain is not None
    others = [n for n in unobserved_findings(network) if n.id != finding_id]
    contexts = math.prod(
        len(n.domain.values) for n in others if n.domain is not None
    )
    size = contexts * len(node.domain.values)
    if size > bound:
        raise StateSpaceTooLargeError(size, bound)

    base = dict(network.observations)
    base.pop(finding_id, None)
    names = [n.id for n in others]
    domains = [n.domain.values for n in others if n.domain is not None]
    affected: set[str] = set()
    candidates = set(reachable)
    for combo in itertools.product(*domains):
        context = base.copy()
        context.update(zip(names, combo))
        reference: dict[str, BeliefLevel] | None = None
        for value in node.domain.values:
            context[finding_id] = value
            beliefs = _beliefs_or_none(network, context)
            if beliefs is None:
                continue
            if reference is None:
                reference = beliefs
                continue
            for affected_id in candidates - affected:
                if beliefs[affected_id] is not reference[affected_id]:
                    affected.add(affected_id)
        if affected == candidates:
            break
    return affected


# -- discrimination -----------------------------------------------------------


def query_discriminate(
    network: Network,
    h1: str,
    h2: str,
    mode: str = "auto",
    bound: int = ORACLE_BOUND,
) -> set[str]:
    """Findings and clusters able to move two hypotheses in opposite directions.

    A node qualifies when it has a directed role-path to both hypotheses and
    some outcome of it moves the two beliefs in opposite rank directions.
    Semantic mode verifies this exactly over evidence contexts — partial
    assignments of the currently-unobserved findings, i.e. the consultation
    states reachable from here — and is used automatically when that space
    fits the oracle bound; heuristic mode tests for role paths of opposite
    sign products instead.
    """
    for h in (h1, h2):
        if network.node(h).kind is not NodeKind.HYPOTHESIS:
            raise InvalidQueryError("discrimination queries take two hypotheses")
    if mode not in ("auto", "semantic", "heuristic"):
        raise InvalidQueryError(f"not a discrimination mode: {mode!r}")
    if h1 == h2:
        return set()

    pool: list[tuple[NodeSpec, set[int], set[int]]] = []
    for node in network.nodes.values():
        if node.kind is NodeKind.HYPOTHESIS:
            continue
        signs1 = network.role_path_signs(node.id, h1)
        if not signs1:
            continue
        signs2 = network.role_path_signs(node.id, h2)
        if not signs2:
            continue
        pool.append((node, signs1, signs2))

    size = context_space_size(network)
    semantic_ok = size <= bound
    if mode == "heuristic" or (mode == "auto" and not semantic_ok):
        return {
            node.id
            for node, signs1, signs2 in pool
            if any(s1 * s2 < 0 for s1 in signs1 for s2 in signs2)
        }
    if not semantic_ok:
        raise StateSpaceTooLargeError(size, bound)

    result: set[str] = set()
    for node, _, _ in pool:
        if node.kind is NodeKind.FINDING:
            if _finding_discriminates(network, node, h1, h2):
                result.add(node.id)
        else:
            if _cluster_discriminates(network, node, h1, h2):
                result.add(node.id)
    return result


def context_space_size(network: Network) -> int:
    """Number of evidence contexts (partial unobserved-finding assignments)."""
    return math.prod(
        len(node.domain.values) + 1
        for node in unobserved_findings(network)
        if node.domain is not None
    )


def _partial_assignments(nodes: list[NodeSpec]):
    """All partial value assignments over ``nodes``, smallest first.

    Starting from the empty context makes witness searches finish almost
    immediately in the common case, since minimal witnesses involve few
    findings.
    """
    for width in range(0, len(nodes) + 1):
        for group in itertools.combinations(nodes, width):
            ids = [node.id for node in group]
            for combo in itertools.product(
                *(node.domain.values for node in group if node.domain is not None)
            ):
                yield dict(zip(ids, combo))


def _finding_discriminates(
    network: Network, node: NodeSpec, h1: str, h2: str
) -> bool:
    """Some value pair of the finding splits h1 and h2 in some context."""
    assert node.domain is not None
    others = [n for n in unobserved_findings(network) if n.id != node.id]
    base = dict(network.observations)
    base.pop(node.id, None)
    for context in _partial_assignments(others):
        values = base.copy()
        values.update(context)
        ranks: list[tuple[int, int]] = []
        for value in node.domain.values:
            values[node.id] = value
            beliefs = _beliefs_or_none(network, values)
            if beliefs is not None:
                ranks.append((beliefs[h1].rank, beliefs[h2].rank))
        if _opposite_pair(ranks):
            return True
    return False


def _cluster_discriminates(
    network: Network, node: NodeSpec, h1: str, h2: str
) -> bool:
    """Varying the cluster's own evidence can split the two hypotheses.

    Evidence states that agree outside the cluster's ancestor findings but
    give the cluster different beliefs must move the hypotheses in opposite
    directions for some such pair.
    """
    ancestors = {
        n.id for n in network.findings() if node.id in network.reachable_from(n.id)
    }
    unobserved = unobserved_findings(network)
    varying = [n for n in unobserved if n.id in ancestors]
    fixed = [n for n in unobserved if n.id not in ancestors]
    if not varying:
        return False
    base = dict(network.observations)
    for context in _partial_assignments(fixed):
        outcomes: list[tuple[BeliefLevel, int, int]] = []
        shared = base.copy()
        shared.update(context)
        for own in _partial_assignments(varying):
            values = shared.copy()
            values.update(own)
            beliefs = _beliefs_or_none(network, values)
            if beliefs is not None:
                outcomes.append(
                    (beliefs[node.id], beliefs[h1].rank, beliefs[h2].rank)
                )
        for (belief_a, r1a, r2a), (belief_b, r1b, r2b) in itertools.combinations(
            outcomes, 2
        ):
            if belief_a is belief_b:
                continue
            if (r1a - r1b) * (r2a - r2b) < 0:
                return True
    return False


def _opposite_pair(ranks: list[tuple[int, int]]) -> bool:
    return any(
        (r1a - r1b) * (r2a - r2b) < 0
        for (r1a, r2a), (r1b, r2b) in itertools.combinations(ranks, 2)
    )
