"""Typed inference network and deterministic qualitative belief propagation.

The network is a DAG with findings at the bottom, clusters in the middle,
and hypotheses at the top, linked by roles of evidence. Each cluster and
hypothesis carries a local combining function: an ordered list of rules
mapping predecessor belief states to an output level. Propagation sets
finding beliefs from observations, sweeps the graph once in topological
order, then recomputes every dynamic control parameter.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Union

from .actions import ActionSpec, DEFAULT_STRATEGY, Strategy
from .exprs import (
    Expr,
    ParamValue,
    UnboundParameterError,
    builtin_parameters,
    eval_expr,
    referenced_parameters,
    ParamKind,
    ParameterDef,
)
from .levels import (
    ALL_LEVELS,
    BeliefLevel,
    EvidenceRole,
    ThresholdMode,
    UPWARD_ROLES,
    satisfies_threshold,
)


class NodeKind(enum.Enum):
    FINDING = "finding"
    CLUSTER = "cluster"
    HYPOTHESIS = "hypothesis"

    @classmethod
    def from_label(cls, label: str) -> NodeKind:
        for kind in cls:
            if kind.value == label:
                return kind
        raise ValueError(f"not a node kind: {label!r}")


# Finding value sets that behave like yes/no answers; the positive value
# confirms the finding node and the negative one disconfirms it.
_BOOLEAN_DOMAINS = ({"true", "false"}, {"present", "absent"})
_POSITIVE_VALUES = {"true", "present"}


@dataclass(frozen=True)
class NumericBin:
    """Inclusive numeric range mapped to a symbolic finding value."""

    low: float
    high: float
    label: str

    def contains(self, number: float) -> bool:
        return self.low <= number <= self.high


@dataclass(frozen=True)
class ValueDomain:
    """Admissible observed values of a finding, with optional numeric bins."""

    values: tuple[str, ...]
    bins: tuple[NumericBin, ...] = ()

    def __post_init__(self):
        if not self.values:
            raise ValueError("a finding needs at least one admissible value")

    @property
    def is_boolean(self) -> bool:
        return set(self.values) in _BOOLEAN_DOMAINS

    def normalize(self, raw: object) -> str:
        """Map a raw observation (symbol, bool, or number) into the domain.

        Raises ValueError when the observation cannot be interpreted.
        """
        if isinstance(raw, bool):
            raw = "true" if raw else "false"
        if isinstance(raw, (int, float)):
            for bin_ in self.bins:
                if bin_.contains(raw):
                    return bin_.label
            raise ValueError(f"number {raw} falls in no declared bin")
        value = str(raw)
        if value not in self.values:
            raise ValueError(f"value {value!r} not in domain {list(self.values)}")
        return value


BOOLEAN_DOMAIN = ValueDomain(("true", "false"))


@dataclass(frozen=True)
class BeliefAtom:
    """Condition atom comparing a predecessor's belief to a bound."""

    source: str
    mode: ThresholdMode
    bound: BeliefLevel

    def unparse(self) -> str:
        return f"{self.source} {self.mode.value} {self.bound.label}"


@dataclass(frozen=True)
class ValueAtom:
    """Condition atom matching a predecessor finding's observed value."""

    source: str
    value: str

    def unparse(self) -> str:
        return f"{self.source} = {self.value}"


RuleAtom = Union[BeliefAtom, ValueAtom]


@dataclass(frozen=True)
class CombiningRule:
    """One condition -> level entry of a node's local combining function.

    Priority is the rule's position in the node's ordered list; conditions
    are conjunctions of atoms over linked predecessors.
    """

    atoms: tuple[RuleAtom, ...]
    output: BeliefLevel

    def unparse(self) -> str:
        condition = " and ".join(atom.unparse() for atom in self.atoms)
        return f"if {condition} then {self.output.label}"

    def sources(self) -> set[str]:
        return {atom.source for atom in self.atoms}


@dataclass(frozen=True)
class NodeSpec:
    """A finding, cluster, or hypothesis declaration."""

    id: str
    kind: NodeKind
    domain: ValueDomain | None = None  # findings only
    dangerous: bool = False  # hypotheses only
    rules: tuple[CombiningRule, ...] = ()  # clusters and hypotheses only

    @property
    def static_params(self) -> dict[str, ParamValue]:
        if self.kind is NodeKind.HYPOTHESIS:
            return {"dangerous": self.dangerous}
        return {}


@dataclass(frozen=True)
class EvidenceLink:
    source: str
    target: str
    role: EvidenceRole

    def unparse(self) -> str:
        return f"{self.source} -> {self.target} role {self.role.label}"


@dataclass(frozen=True)
class Violation:
    """One structural problem found while validating a network."""

    code: str
    subject: str  # node/link/action identity the problem is about
    message: str

    def __str__(self) -> str:
        return f"{self.code} [{self.subject}]: {self.message}"


class NetworkValidationError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"invalid network: {lines}")


class UnknownNodeError(KeyError):
    def __init__(self, node_id: str):
        super().__init__(node_id)
        self.node_id = node_id

    def __str__(self) -> str:
        return f"unknown node: {self.node_id!r}"


class UnknownFindingError(UnknownNodeError):
    def __str__(self) -> str:
        return f"unknown finding: {self.node_id!r}"


class OutOfDomainError(ValueError):
    def __init__(self, finding: str, detail: str):
        super().__init__(f"bad value for finding {finding!r}: {detail}")
        self.finding = finding


class InconsistentEvidenceError(RuntimeError):
    """A node's evidence simultaneously confirms and disconfirms it."""

    def __init__(self, node_id: str):
        super().__init__(
            f"evidence for node {node_id!r} matches both a confirming and a "
            "disconfirming rule"
        )
        self.node_id = node_id


@dataclass(frozen=True)
class PropagationResult:
    beliefs: dict[str, BeliefLevel]
    dynamic_params: dict[str, dict[str, ParamValue]]
    diff: tuple[tuple[str, BeliefLevel, BeliefLevel], ...]

    def changed_nodes(self) -> set[str]:
        return {node_id for node_id, _, _ in self.diff}


class Network:
    """A validated network plus the current consultation state.

    Structure (nodes, links, rules, parameter definitions, actions) is
    immutable after validation. The only mutating operation is
    ``propagate``; callers must serialize mutations per instance, while
    read-only queries may interleave between them.
    """

    def __init__(
        self,
        nodes: list[NodeSpec],
        links: list[EvidenceLink],
        parameter_defs: list[ParameterDef],
        actions: list[ActionSpec],
        strategy: Strategy,
    ):
        # Constructed via validate_network; no re-checking here.
        self.nodes: dict[str, NodeSpec] = {node.id: node for node in nodes}
        self.links: tuple[EvidenceLink, ...] = tuple(links)
        self.parameter_defs: tuple[ParameterDef, ...] = tuple(parameter_defs)
        self.actions: dict[str, ActionSpec] = {a.id: a for a in actions}
        self.strategy = strategy
        self.declaration_order: dict[str, int] = {
            node.id: index for index, node in enumerate(nodes)
        }
        self.action_order: dict[str, int] = {
            action.id: index for index, action in enumerate(actions)
        }

        self.predecessors: dict[str, list[EvidenceLink]] = {n.id: [] for n in nodes}
        self.successors: dict[str, list[EvidenceLink]] = {n.id: [] for n in nodes}
        for link in links:
            self.predecessors[link.target].append(link)
            self.successors[link.source].append(link)
        self.topo_order: tuple[str, ...] = _topological_order(nodes, links)

        self._derived_by_kind: dict[NodeKind, list[ParameterDef]] = {
            kind: [] for kind in NodeKind
        }
        for definition in parameter_defs:
            if definition.kind is ParamKind.DERIVED:
                kind = NodeKind.from_label(definition.applies_to)
                self._derived_by_kind[kind].append(definition)

        self.observations: dict[str, str] = {}
        state = _evaluate(self, {})
        self.beliefs: dict[str, BeliefLevel] = state[0]
        self.dynamic_params: dict[str, dict[str, ParamValue]] = state[1]

    # -- structure helpers -------------------------------------------------

    def node(self, node_id: str) -> NodeSpec:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def findings(self) -> list[NodeSpec]:
        return [n for n in self.nodes.values() if n.kind is NodeKind.FINDING]

    def hypotheses(self) -> list[NodeSpec]:
        return [n for n in self.nodes.values() if n.kind is NodeKind.HYPOTHESIS]

    def clusters(self) -> list[NodeSpec]:
        return [n for n in self.nodes.values() if n.kind is NodeKind.CLUSTER]

    def reachable_from(self, node_id: str) -> set[str]:
        """All nodes downstream of ``node_id`` via evidence links."""
        self.node(node_id)
        seen: set[str] = set()
        frontier = [node_id]
        while frontier:
            current = frontier.pop()
            for link in self.successors[current]:
                if link.target not in seen:
                    seen.add(link.target)
                    frontier.append(link.target)
        return seen

    def role_path_signs(self, source: str, target: str) -> set[int]:
        """Signs (+1/-1) of every evidence-role path from source to target."""
        self.node(source)
        self.node(target)
        signs: set[int] = set()

        def walk(current: str, sign: int) -> None:
            for link in self.successors[current]:
                next_sign = sign * link.role.sign
                if link.target == target:
                    signs.add(next_sign)
                else:
                    walk(link.target, next_sign)

        walk(source, 1)
        return signs

    def derived_defs(self, kind: NodeKind) -> list[ParameterDef]:
        return self._derived_by_kind[kind]

    def normalize_value(self, finding_id: str, raw: object) -> str:
        node = self.nodes.get(finding_id)
        if node is None or node.kind is not NodeKind.FINDING:
            raise UnknownFindingError(finding_id)
        assert node.domain is not None
        try:
            return node.domain.normalize(raw)
        except ValueError as exc:
            raise OutOfDomainError(finding_id, str(exc)) from None

    # -- state -------------------------------------------------------------

    def evaluate(
        self, observations: dict[str, object]
    ) -> tuple[dict[str, BeliefLevel], dict[str, dict[str, ParamValue]]]:
        """Pure evaluation of beliefs and dynamic parameters; no mutation."""
        return _evaluate(self, observations)

    def node_params(self, node_id: str) -> dict[str, ParamValue]:
        """Current full parameter view of a node (belief, statics, dynamics)."""
        node = self.node(node_id)
        params: dict[str, ParamValue] = {"belief": self.beliefs[node_id]}
        params.update(node.static_params)
        params.update(self.dynamic_params[node_id])
        return params

    def beliefs_for(self, values: dict[str, str]) -> dict[str, BeliefLevel]:
        """Belief map for already-normalized observation values.

        Fast path for enumeration-heavy queries: skips dynamic-parameter
        computation and input normalization, and never mutates state.
        """
        beliefs: dict[str, BeliefLevel] = {}
        for node_id in self.topo_order:
            node = self.nodes[node_id]
            if node.kind is NodeKind.FINDING:
                beliefs[node_id] = _finding_belief(node, values.get(node_id))
            else:
                predecessor_beliefs = {
                    link.source: beliefs[link.source]
                    for link in self.predecessors[node_id]
                }
                beliefs[node_id] = evaluate_combining(
                    node, predecessor_beliefs, values
                )
        return beliefs


def propagate(network: Network, observations: dict[str, object]) -> PropagationResult:
    """Set finding beliefs from the full observation set and sweep the net.

    ``observations`` is the complete evidence for the consultation (not an
    increment); the result is a pure function of (network structure,
    observation set). The network's current state is replaced and the diff
    against the previous state is reported.
    """
    beliefs, dynamic = _evaluate(network, observations)
    diff = tuple(
        (node_id, old, beliefs[node_id])
        for node_id, old in network.beliefs.items()
        if beliefs[node_id] is not old
    )
    network.observations = {
        finding: network.normalize_value(finding, value)
        for finding, value in observations.items()
    }
    network.beliefs = beliefs
    network.dynamic_params = dynamic
    return PropagationResult(beliefs=beliefs, dynamic_params=dynamic, diff=diff)


def evaluate_combining(
    node: NodeSpec,
    predecessor_beliefs: dict[str, BeliefLevel],
    finding_values: dict[str, str],
) -> BeliefLevel:
    """Resolve a node's combining function against current predecessor state.

    All matching rules are collected first. A simultaneous confirmed and
    disconfirmed match is an evidence inconsistency; otherwise a confirming
    (resp. disconfirming) match is decisive, then the highest-priority
    match wins, and no match at all leaves the node unknown.
    """
    matched = [
        rule
        for rule in node.rules
        if _condition_holds(rule, predecessor_beliefs, finding_values)
    ]
    if not matched:
        return BeliefLevel.UNKNOWN
    outputs = {rule.output for rule in matched}
    if BeliefLevel.CONFIRMED in outputs and BeliefLevel.DISCONFIRMED in outputs:
        raise InconsistentEvidenceError(node.id)
    if BeliefLevel.CONFIRMED in outputs:
        return BeliefLevel.CONFIRMED
    if BeliefLevel.DISCONFIRMED in outputs:
        return BeliefLevel.DISCONFIRMED
    return matched[0].output


def _condition_holds(
    rule: CombiningRule,
    predecessor_beliefs: dict[str, BeliefLevel],
    finding_values: dict[str, str],
) -> bool:
    for atom in rule.atoms:
        if isinstance(atom, ValueAtom):
            if finding_values.get(atom.source) != atom.value:
                return False
        else:
            belief = predecessor_beliefs[atom.source]
            if not satisfies_threshold(belief, atom.mode, atom.bound):
                return False
    return True


def _evaluate(
    network: Network, observations: dict[str, object]
) -> tuple[dict[str, BeliefLevel], dict[str, dict[str, ParamValue]]]:
    values = {
        finding: network.normalize_value(finding, raw)
        for finding, raw in observations.items()
    }

    beliefs: dict[str, BeliefLevel] = {}
    for node_id in network.topo_order:
        node = network.nodes[node_id]
        if node.kind is NodeKind.FINDING:
            beliefs[node_id] = _finding_belief(node, values.get(node_id))
        else:
            predecessor_beliefs = {
                link.source: beliefs[link.source]
                for link in network.predecessors[node_id]
            }
            beliefs[node_id] = evaluate_combining(node, predecessor_beliefs, values)

    dynamic: dict[str, dict[str, ParamValue]] = {}
    for node_id, node in network.nodes.items():
        params: dict[str, ParamValue] = {}
        if node.kind is NodeKind.FINDING:
            params["observed"] = node_id in values
        if node.kind is NodeKind.HYPOTHESIS:
            params["triggered"] = _is_triggered(network, node_id, beliefs)
        bindings: dict[str, ParamValue] = {"belief": beliefs[node_id]}
        bindings.update(node.static_params)
        bindings.update(params)
        for definition in network.derived_defs(node.kind):
            assert definition.expression is not None
            value = eval_expr(definition.expression, bindings)
            params[definition.name] = value
            bindings[definition.name] = value
        dynamic[node_id] = params

    return beliefs, dynamic


def _finding_belief(node: NodeSpec, value: str | None) -> BeliefLevel:
    if value is None:
        return BeliefLevel.UNKNOWN
    assert node.domain is not None
    if node.domain.is_boolean:
        if value in _POSITIVE_VALUES:
            return BeliefLevel.CONFIRMED
        return BeliefLevel.DISCONFIRMED
    # A categorical observation is certain knowledge of the finding.
    return BeliefLevel.CONFIRMED


def _is_triggered(
    network: Network, node_id: str, beliefs: dict[str, BeliefLevel]
) -> bool:
    # A hypothesis is evoked once it has support itself or any predecessor
    # that could raise it is at least supported.
    if beliefs[node_id].rank >= BeliefLevel.SUPPORTED.rank:
        return True
    return any(
        link.role in UPWARD_ROLES
        and beliefs[link.source].rank >= BeliefLevel.SUPPORTED.rank
        for link in network.predecessors[node_id]
    )


# -- validation -------------------------------------------------------------


def validate_network(
    nodes: Iterable[NodeSpec],
    links: Iterable[EvidenceLink],
    parameter_defs: Iterable[ParameterDef] = (),
    actions: Iterable[ActionSpec] = (),
    strategy: Strategy | None = None,
) -> Network:
    """Check structure and role/rule consistency, returning a live network.

    Every violation is collected and reported together; nothing is checked
    lazily afterwards, so an accepted network always propagates.
    """
    nodes = list(nodes)
    links = list(links)
    parameter_defs = list(parameter_defs)
    actions = list(actions)
    strategy = strategy or DEFAULT_STRATEGY
    violations: list[Violation] = []

    by_id: dict[str, NodeSpec] = {}
    for node in nodes:
        if node.id in by_id:
            violations.append(
                Violation("duplicate-id", node.id, "node id declared more than once")
            )
        by_id[node.id] = node
        if node.kind is NodeKind.FINDING:
            if node.domain is None:
                violations.append(
                    Violation("invalid-rule", node.id, "finding lacks a value domain")
                )
            if node.rules:
                violations.append(
                    Violation(
                        "invalid-rule", node.id, "findings carry no combining rules"
                    )
                )
        elif node.domain is not None:
            violations.append(
                Violation("invalid-rule", node.id, "only findings declare values")
            )

    seen_action_ids: set[str] = set()
    for action in actions:
        if action.id in by_id or action.id in seen_action_ids:
            violations.append(
                Violation("duplicate-id", action.id, "action id already in use")
            )
        seen_action_ids.add(action.id)

    link_roles: dict[tuple[str, str], set[EvidenceRole]] = {}
    for link in links:
        subject = f"{link.source}->{link.target}"
        missing = [end for end in (link.source, link.target) if end not in by_id]
        if missing:
            violations.append(
                Violation(
                    "dangling-reference",
                    subject,
                    f"link references undeclared node(s) {missing}",
                )
            )
            continue
        source, target = by_id[link.source], by_id[link.target]
        if source.kind is NodeKind.HYPOTHESIS:
            violations.append(
                Violation("invalid-link", subject, "hypotheses are sinks only")
            )
        if target.kind is NodeKind.FINDING:
            violations.append(
                Violation("invalid-link", subject, "findings are sources only")
            )
        pair_roles = link_roles.setdefault((link.source, link.target), set())
        if link.role in pair_roles:
            violations.append(
                Violation("duplicate-id", subject, f"duplicate link role {link.role.label}")
            )
        pair_roles.add(link.role)

    cycle = _find_cycle(nodes, links)
    if cycle:
        violations.append(
            Violation(
                "cycle-detected",
                " -> ".join(cycle),
                "evidence links must form a DAG",
            )
        )

    for node in nodes:
        for rule in node.rules:
            _check_rule(node, rule, by_id, link_roles, violations)

    _check_role_usage(nodes, link_roles, violations)
    _check_parameter_defs(parameter_defs, violations)
    _check_actions(actions, by_id, parameter_defs, strategy, violations)

    if violations:
        raise NetworkValidationError(violations)
    return Network(nodes, links, parameter_defs, actions, strategy)


def _check_rule(
    node: NodeSpec,
    rule: CombiningRule,
    by_id: dict[str, NodeSpec],
    link_roles: dict[tuple[str, str], set[EvidenceRole]],
    violations: list[Violation],
) -> None:
    subject = f"{node.id}: {rule.unparse()}"
    rule_roles: set[EvidenceRole] = set()
    for atom in rule.atoms:
        source = by_id.get(atom.source)
        if source is None:
            violations.append(
                Violation("dangling-reference", subject, f"unknown node {atom.source!r}")
            )
            continue
        roles = link_roles.get((atom.source, node.id))
        if not roles:
            violations.append(
                Violation(
                    "dangling-reference",
                    subject,
                    f"{atom.source!r} has no evidence link into {node.id!r}",
                )
            )
        else:
            rule_roles |= roles
        if isinstance(atom, ValueAtom):
            if source.kind is not NodeKind.FINDING:
                violations.append(
                    Violation(
                        "invalid-rule", subject, f"value match on non-finding {atom.source!r}"
                    )
                )
            elif source.domain and atom.value not in source.domain.values:
                violations.append(
                    Violation(
                        "unknown-value",
                        subject,
                        f"{atom.value!r} not in domain of {atom.source!r}",
                    )
                )
    if rule.output is BeliefLevel.CONFIRMED:
        if EvidenceRole.POTENTIALLY_CONFIRMING not in rule_roles:
            violations.append(
                Violation(
                    "role-rule-inconsistency",
                    subject,
                    "a confirming rule needs a potentially-confirming link",
                )
            )
    if rule.output is BeliefLevel.DISCONFIRMED:
        if EvidenceRole.POTENTIALLY_DISCONFIRMING not in rule_roles:
            violations.append(
                Violation(
                    "role-rule-inconsistency",
                    subject,
                    "a disconfirming rule needs a potentially-disconfirming link",
                )
            )


def _check_role_usage(
    nodes: list[NodeSpec],
    link_roles: dict[tuple[str, str], set[EvidenceRole]],
    violations: list[Violation],
) -> None:
    by_id = {node.id: node for node in nodes}
    for (source, target), roles in link_roles.items():
        target_node = by_id.get(target)
        if target_node is None:
            continue
        citing = [r for r in target_node.rules if source in r.sources()]
        requirements = {
            EvidenceRole.POTENTIALLY_CONFIRMING: (
                lambda out: out is BeliefLevel.CONFIRMED,
                "no confirming rule cites it",
            ),
            EvidenceRole.POTENTIALLY_DISCONFIRMING: (
                lambda out: out is BeliefLevel.DISCONFIRMED,
                "no disconfirming rule cites it",
            ),
            EvidenceRole.POTENTIALLY_SUPPORTING: (
                lambda out: out.rank > 0,
                "no rule with positive output cites it",
            ),
            EvidenceRole.POTENTIALLY_DETRACTING: (
                lambda out: out.rank < 0,
                "no rule with negative output cites it",
            ),
        }
        for role in roles:
            predicate, detail = requirements[role]
            if not any(predicate(rule.output) for rule in citing):
                violations.append(
                    Violation(
                        "role-rule-inconsistency",
                        f"{source}->{target}",
                        f"link declared {role.label} but {detail}",
                    )
                )


def _check_parameter_defs(
    parameter_defs: list[ParameterDef], violations: list[Violation]
) -> None:
    declared: dict[str, set[str]] = {kind.value: set() for kind in NodeKind}
    for definition in parameter_defs:
        if definition.applies_to not in declared:
            violations.append(
                Violation(
                    "unknown-parameter",
                    definition.name,
                    f"unknown node kind {definition.applies_to!r}",
                )
            )
            continue
        vocabulary = set(builtin_parameters(definition.applies_to))
        vocabulary |= declared[definition.applies_to]
        if definition.name in vocabulary:
            violations.append(
                Violation("duplicate-id", definition.name, "parameter already defined")
            )
        if definition.expression is not None:
            unknown = referenced_parameters(definition.expression) - vocabulary
            if unknown:
                # References to later or missing parameters; covers cycles.
                violations.append(
                    Violation(
                        "unknown-parameter",
                        definition.name,
                        f"references undefined parameter(s) {sorted(unknown)} "
                        "(derived parameters may only use earlier definitions)",
                    )
                )
        declared[definition.applies_to].add(definition.name)


def _check_actions(
    actions: list[ActionSpec],
    by_id: dict[str, NodeSpec],
    parameter_defs: list[ParameterDef],
    strategy: Strategy,
    violations: list[Violation],
) -> None:
    from .actions import ActionKind  # local to avoid re-export confusion

    derived_names = {
        kind.value: {
            d.name for d in parameter_defs if d.applies_to == kind.value
        }
        for kind in NodeKind
    }
    for action in actions:
        for finding in action.yields:
            node = by_id.get(finding)
            if node is None or node.kind is not NodeKind.FINDING:
                violations.append(
                    Violation(
                        "invalid-action",
                        action.id,
                        f"yield {finding!r} is not a declared finding",
                    )
                )
        has_belief_precondition = False
        for precondition in action.preconditions:
            node = by_id.get(precondition.node)
            if node is None:
                violations.append(
                    Violation(
                        "dangling-reference",
                        action.id,
                        f"precondition on unknown node {precondition.node!r}",
                    )
                )
                continue
            vocabulary = set(builtin_parameters(node.kind.value))
            vocabulary |= derived_names[node.kind.value]
            unknown = referenced_parameters(precondition.expression) - vocabulary
            if unknown:
                violations.append(
                    Violation(
                        "unknown-parameter",
                        action.id,
                        f"precondition uses undefined parameter(s) {sorted(unknown)}",
                    )
                )
            if "belief" in referenced_parameters(precondition.expression):
                has_belief_precondition = True
        if action.kind is ActionKind.TREATMENT and not has_belief_precondition:
            violations.append(
                Violation(
                    "invalid-action",
                    action.id,
                    "treatments require at least one belief precondition",
                )
            )
    for finding in strategy.presenting:
        node = by_id.get(finding)
        if node is None or node.kind is not NodeKind.FINDING:
            violations.append(
                Violation(
                    "dangling-reference",
                    "strategy",
                    f"presenting finding {finding!r} is not declared",
                )
            )


def _topological_order(
    nodes: list[NodeSpec], links: list[EvidenceLink]
) -> tuple[str, ...]:
    # Kahn's algorithm, seeded in declaration order for determinism.
    indegree = {node.id: 0 for node in nodes}
    outgoing: dict[str, list[str]] = {node.id: [] for node in nodes}
    for link in links:
        outgoing[link.source].append(link.target)
        indegree[link.target] += 1
    ready = [node.id for node in nodes if indegree[node.id] == 0]
    order: list[str] = []
    while ready:
        current = ready.pop(0)
        order.append(current)
        for target in outgoing[current]:
            indegree[target] -= 1
            if indegree[target] == 0:
                ready.append(target)
    if len(order) != len(nodes):
        raise NetworkValidationError(
            [Violation("cycle-detected", "network", "evidence links form a cycle")]
        )
    return tuple(order)


def _find_cycle(nodes: list[NodeSpec], links: list[EvidenceLink]) -> list[str] | None:
    outgoing: dict[str, list[str]] = {node.id: [] for node in nodes}
    for link in links:
        if link.source in outgoing and link.target in outgoing:
            outgoing[link.source].append(link.target)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node.id: WHITE for node in nodes}
    stack: list[str] = []

    def visit(node_id: str) -> list[str] | None:
        color[node_id] = GRAY
        stack.append(node_id)
        for target in outgoing[node_id]:
            if color[target] == GRAY:
                start = stack.index(target)
                return stack[start:] + [target]
            if color[target] == WHITE:
                found = visit(target)
                if found:
                    return found
        stack.pop()
        color[node_id] = BLACK
        return None

    for node in nodes:
        if color[node.id] == WHITE:
            found = visit(node.id)
            if found:
                return found
    return None
