"""Text language for knowledge bases (``.mu`` files).

A knowledge base is a sequence of keyword-led declarations in UTF-8 text:

    kb chest-pain
    parameter critical on hypothesis = (belief at-least supported) and dangerous
    finding age { values: under-40, 40-to-60, over-60; bins: 0..39 under-40, ... }
    cluster postprandial { rule: if pain-after-eating = false then disconfirmed }
    hypothesis angina { dangerous: true; rule: if ... then supported }
    link postprandial -> angina role potentially-detracting
    action ekg { kind: test; cost: { monetary: low, risk: free, discomfort: low }; yields: ekg-result }
    strategy default { cost-priority: risk, monetary, discomfort }

``#`` starts a comment; identifiers and symbolic values are kebab-case; block
entries are separated by newlines or semicolons. Declaration order within a
category is preserved because it is semantically meaningful (rule priority,
tie-breaks). ``serialize_kb`` renders a canonical form (categories in a fixed
order, one entry per line) that re-parses to a structurally equal document and
re-serializes byte-identically. Problems are reported as :class:`Diagnostic`
values with file/line/column positions rather than bare exceptions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .actions import ActionKind, ActionSpec, Precondition, Strategy
from .exprs import (
    And,
    Comparison,
    Expr,
    Not,
    Or,
    ParamKind,
    ParamRef,
    ParamValue,
    ParameterDef,
    Threshold,
    ValueType,
)
from .levels import (
    BeliefLevel,
    COST_DIMENSIONS,
    CostGrade,
    CostVector,
    EvidenceRole,
    ThresholdMode,
)
from .network import (
    BeliefAtom,
    CombiningRule,
    EvidenceLink,
    Network,
    NodeKind,
    NodeSpec,
    NumericBin,
    RuleAtom,
    ValueAtom,
    ValueDomain,
    Violation,
    validate_network,
)


@dataclass(frozen=True)
class SourceLocation:
    file: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    """One located problem in a knowledge-base text."""

    location: SourceLocation
    severity: str  # "error" | "warning"
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.severity} {self.code} {self.message}"


class KbParseError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


@dataclass
class KnowledgeBase:
    """Parsed knowledge base: declarations plus source locations.

    ``nodes`` holds findings, then clusters, then hypotheses, each group in
    declaration order. ``locations`` maps declaration subjects (node ids,
    action ids, "source->target" link keys, rule texts) back to source
    positions so structural violations can be reported against the file; it
    does not participate in equality.
    """

    name: str = "unnamed"
    nodes: list[NodeSpec] = field(default_factory=list)
    links: list[EvidenceLink] = field(default_factory=list)
    parameter_defs: list[ParameterDef] = field(default_factory=list)
    actions: list[ActionSpec] = field(default_factory=list)
    strategy: Strategy = field(default_factory=Strategy)
    locations: dict[str, SourceLocation] = field(
        default_factory=dict, compare=False, repr=False
    )

    def build(self) -> Network:
        """Validate the declarations and return a live network."""
        return validate_network(
            self.nodes, self.links, self.parameter_defs, self.actions, self.strategy
        )


def parse_kb(text: str, filename: str = "<kb>") -> KnowledgeBase:
    """Parse knowledge-base text, raising KbParseError on any error."""
    tokens, diagnostics = _tokenize(text, filename)
    parser = _Parser(tokens, filename, diagnostics)
    kb = parser.parse()
    errors = [d for d in parser.diagnostics if d.severity == "error"]
    if errors:
        raise KbParseError(parser.diagnostics)
    return kb


def load_kb(path: str | Path) -> KnowledgeBase:
    path = Path(path)
    return parse_kb(path.read_text(encoding="utf-8"), filename=str(path))


def parse_expression(text: str) -> Expr:
    """Parse a stand-alone parameter expression (used by query predicates)."""
    tokens, diagnostics = _tokenize(text, "<expr>")
    parser = _Parser(tokens, "<expr>", diagnostics)
    expr: Expr | None = None
    try:
        parser._skip_separators()
        expr = parser._parse_expr()
        parser._skip_separators()
        if not parser._check("eof"):
            tok = parser._peek()
            raise parser._error(
                tok, "syntax-error", f"unexpected {tok.text!r} after expression"
            )
    except _EntryError:
        pass
    errors = [d for d in parser.diagnostics if d.severity == "error"]
    if errors or expr is None:
        raise KbParseError(parser.diagnostics)
    return expr


def diagnostics_from_violations(
    kb: KnowledgeBase, violations: list[Violation], filename: str = "<kb>"
) -> list[Diagnostic]:
    """Map structural violations back to source positions."""
    fallback = kb.locations.get("kb", SourceLocation(filename, 1, 1))
    return [
        Diagnostic(
            location=kb.locations.get(violation.subject, fallback),
            severity="error",
            code=violation.code,
            message=f"{violation.message} [{violation.subject}]",
        )
        for violation in violations
    ]


# -- tokenizer ----------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # word | number | punctuation kinds | nl | eof
    text: str
    line: int
    col: int


_WORD_CHARS = set("abcdefghijklmnopqrstuvwxyz0123456789-")
_WORD_SHAPE = re.compile(r"^[a-z0-9]+(-[a-z0-9]+)*$")
_PUNCT_KINDS = {"{", "}", ":", ";", ",", "=", "(", ")"}


def _tokenize(text: str, filename: str) -> tuple[list[_Token], list[Diagnostic]]:
    tokens: list[_Token] = []
    diagnostics: list[Diagnostic] = []
    line, col, i = 1, 1, 0
    length = len(text)

    while i < length:
        ch = text[i]
        if ch == "\n":
            tokens.append(_Token("nl", "\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < length and text[i] != "\n":
                i += 1
                col += 1
            continue
        if ch == "-" and i + 1 < length and text[i + 1] == ">":
            tokens.append(_Token("->", "->", line, col))
            i += 2
            col += 2
            continue
        if ch == "." and i + 1 < length and text[i + 1] == ".":
            tokens.append(_Token("..", "..", line, col))
            i += 2
            col += 2
            continue
        if ch == "!" and i + 1 < length and text[i + 1] == "=":
            tokens.append(_Token("!=", "!=", line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT_KINDS:
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch in _WORD_CHARS:
            start, start_col = i, col
            while i < length and text[i] in _WORD_CHARS:
                # Stop before an arrow so "a->b" splits into three tokens.
                if text[i] == "-" and i + 1 < length and text[i + 1] == ">":
                    break
                i += 1
                col += 1
            word = text[start:i]
            if word.isdigit():
                tokens.append(_Token("number", word, line, start_col))
            elif _WORD_SHAPE.match(word):
                tokens.append(_Token("word", word, line, start_col))
            else:
                diagnostics.append(
                    Diagnostic(
                        SourceLocation(filename, line, start_col),
                        "error",
                        "syntax-error",
                        f"malformed identifier {word!r} (kebab-case expected)",
                    )
                )
            continue
        diagnostics.append(
            Diagnostic(
                SourceLocation(filename, line, col),
                "error",
                "syntax-error",
                f"unexpected character {ch!r}",
            )
        )
        i += 1
        col += 1

    tokens.append(_Token("eof", "", line, col))
    return tokens, diagnostics


# -- parser -------------------------------------------------------------------


class _EntryError(Exception):
    """Internal unwind signal; the diagnostic is already recorded."""


_DECLARATION_KEYWORDS = (
    "kb",
    "parameter",
    "finding",
    "cluster",
    "hypothesis",
    "link",
    "action",
    "strategy",
)


class _Parser:
    def __init__(
        self, tokens: list[_Token], filename: str, diagnostics: list[Diagnostic]
    ):
        self.tokens = tokens
        self.filename = filename
        self.diagnostics = diagnostics
        self.i = 0
        self.kb_name: str | None = None
        self.findings: list[NodeSpec] = []
        self.clusters: list[NodeSpec] = []
        self.hypotheses: list[NodeSpec] = []
        self.links: list[EvidenceLink] = []
        self.parameter_defs: list[ParameterDef] = []
        self.actions: list[ActionSpec] = []
        self.strategy: Strategy | None = None
        self.locations: dict[str, SourceLocation] = {}

    # primitive machinery

    def _peek(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def _check(self, kind: str) -> bool:
        return self._peek().kind == kind

    def _at_word(self, text: str) -> bool:
        tok = self._peek()
        return tok.kind == "word" and tok.text == text

    def _location(self, tok: _Token) -> SourceLocation:
        return SourceLocation(self.filename, tok.line, tok.col)

    def _error(self, tok: _Token, code: str, message: str) -> _EntryError:
        self.diagnostics.append(Diagnostic(self._location(tok), "error", code, message))
        return _EntryError()

    def _expect(self, kind: str, what: str) -> _Token:
        tok = self._peek()
        if tok.kind != kind:
            shown = tok.text or "end of file"
            raise self._error(tok, "syntax-error", f"expected {what}, found {shown!r}")
        return self._advance()

    def _expect_word(self, what: str) -> _Token:
        return self._expect("word", what)

    def _expect_keyword(self, text: str) -> _Token:
        tok = self._peek()
        if not self._at_word(text):
            shown = tok.text or "end of file"
            raise self._error(tok, "syntax-error", f"expected {text!r}, found {shown!r}")
        return self._advance()

    def _skip_separators(self) -> None:
        while self._check("nl") or self._check(";"):
            self._advance()

    def _end_of_entry(self) -> None:
        if self._check("nl") or self._check(";"):
            self._advance()
        elif not (self._check("}") or self._check("eof")):
            tok = self._peek()
            raise self._error(
                tok, "syntax-error", f"expected end of entry, found {tok.text!r}"
            )

    def _recover(self) -> None:
        """Skip to the next declaration/entry boundary after a syntax error."""
        depth = 0
        while True:
            tok = self._peek()
            if tok.kind == "eof":
                return
            if tok.kind in ("nl", ";") and depth == 0:
                self._advance()
                return
            if tok.kind == "{":
                depth += 1
            elif tok.kind == "}":
                if depth == 0:
                    return
                depth -= 1
            self._advance()

    # top level

    def parse(self) -> KnowledgeBase:
        parsers = {
            "kb": self._parse_header,
            "parameter": self._parse_parameter,
            "finding": self._parse_finding,
            "cluster": self._parse_cluster,
            "hypothesis": self._parse_hypothesis,
            "link": self._parse_link,
            "action": self._parse_action,
            "strategy": self._parse_strategy,
        }
        while True:
            self._skip_separators()
            if self._check("eof"):
                break
            tok = self._peek()
            if tok.kind != "word" or tok.text not in _DECLARATION_KEYWORDS:
                self.diagnostics.append(
                    Diagnostic(
                        self._location(tok),
                        "error",
                        "unknown-keyword",
                        f"expected a declaration keyword, found {tok.text!r}",
                    )
                )
                self._advance()
                self._recover()
                continue
            self._advance()
            try:
                parsers[tok.text]()
            except _EntryError:
                self._recover()

        self._check_duplicates()
        return KnowledgeBase(
            name=self.kb_name if self.kb_name is not None else "unnamed",
            nodes=[*self.findings, *self.clusters, *self.hypotheses],
            links=self.links,
            parameter_defs=self.parameter_defs,
            actions=self.actions,
            strategy=self.strategy or Strategy(),
            locations=self.locations,
        )

    def _check_duplicates(self) -> None:
        categories = {
            "finding": self.findings,
            "cluster": self.clusters,
            "hypothesis": self.hypotheses,
        }
        for label, nodes in categories.items():
            seen: set[str] = set()
            for node in nodes:
                if node.id in seen:
                    self.diagnostics.append(
                        Diagnostic(
                            self.locations.get(
                                node.id, SourceLocation(self.filename, 1, 1)
                            ),
                            "error",
                            "duplicate-id",
                            f"{label} {node.id!r} declared more than once",
                        )
                    )
                seen.add(node.id)
        seen = set()
        for action in self.actions:
            if action.id in seen:
                self.diagnostics.append(
                    Diagnostic(
                        self.locations.get(
                            action.id, SourceLocation(self.filename, 1, 1)
                        ),
                        "error",
                        "duplicate-id",
                        f"action {action.id!r} declared more than once",
                    )
                )
            seen.add(action.id)

    # declarations

    def _parse_header(self) -> None:
        name_tok = self._expect_word("a knowledge-base name")
        if self.kb_name is not None:
            raise self._error(name_tok, "duplicate-id", "kb header given twice")
        self.kb_name = name_tok.text
        self.locations["kb"] = self._location(name_tok)
        self._end_of_entry()

    def _parse_parameter(self) -> None:
        name_tok = self._expect_word("a parameter name")
        self._expect_keyword("on")
        kind_tok = self._expect_word("a node kind")
        if kind_tok.text not in ("finding", "cluster", "hypothesis"):
            raise self._error(
                kind_tok, "unknown-keyword", f"not a node kind: {kind_tok.text!r}"
            )
        self._expect("=", "'='")
        expr = self._parse_expr()
        self._end_of_entry()
        self.locations[name_tok.text] = self._location(name_tok)
        self.parameter_defs.append(
            ParameterDef(
                name=name_tok.text,
                kind=ParamKind.DERIVED,
                value_type=ValueType.BOOLEAN,
                applies_to=kind_tok.text,
                expression=expr,
            )
        )

    def _parse_finding(self) -> None:
        name_tok = self._expect_word("a finding name")
        self._expect("{", "'{'")
        self._skip_separators()
        values: tuple[str, ...] | None = None
        bins: tuple[NumericBin, ...] = ()
        while not self._check("}") and not self._check("eof"):
            key = self._expect_word("'values' or 'bins'")
            self._expect(":", "':'")
            if key.text == "values":
                if values is not None:
                    raise self._error(key, "duplicate-id", "values given twice")
                values = self._parse_word_list("a value")
            elif key.text == "bins":
                if bins:
                    raise self._error(key, "duplicate-id", "bins given twice")
                bins = self._parse_bins()
            else:
                raise self._error(
                    key, "unknown-keyword", f"unknown finding key {key.text!r}"
                )
            self._end_of_entry()
            self._skip_separators()
        self._expect("}", "'}'")
        self._end_of_entry()
        if values is None:
            raise self._error(name_tok, "syntax-error", "finding declares no values")
        for bin_ in bins:
            if bin_.label not in values:
                self.diagnostics.append(
                    Diagnostic(
                        self._location(name_tok),
                        "error",
                        "unknown-value",
                        f"bin label {bin_.label!r} is not a declared value",
                    )
                )
        self.locations[name_tok.text] = self._location(name_tok)
        self.findings.append(
            NodeSpec(
                id=name_tok.text,
                kind=NodeKind.FINDING,
                domain=ValueDomain(values=values, bins=bins),
            )
        )

    def _parse_bins(self) -> tuple[NumericBin, ...]:
        bins: list[NumericBin] = []
        while True:
            low = int(self._expect("number", "a bin lower bound").text)
            self._expect("..", "'..'")
            high_tok = self._expect("number", "a bin upper bound")
            high = int(high_tok.text)
            if high < low:
                raise self._error(high_tok, "syntax-error", "bin upper bound below lower")
            label = self._expect_word("a bin label").text
            bins.append(NumericBin(low=low, high=high, label=label))
            if not self._check(","):
                return tuple(bins)
            self._advance()

    def _parse_cluster(self) -> None:
        name_tok = self._expect_word("a cluster name")
        rules = self._parse_node_block(name_tok.text, allow_dangerous=False)[1]
        self.locations[name_tok.text] = self._location(name_tok)
        self.clusters.append(
            NodeSpec(id=name_tok.text, kind=NodeKind.CLUSTER, rules=rules)
        )

    def _parse_hypothesis(self) -> None:
        name_tok = self._expect_word("a hypothesis name")
        dangerous, rules = self._parse_node_block(name_tok.text, allow_dangerous=True)
        self.locations[name_tok.text] = self._location(name_tok)
        self.hypotheses.append(
            NodeSpec(
                id=name_tok.text,
                kind=NodeKind.HYPOTHESIS,
                dangerous=dangerous,
                rules=rules,
            )
        )

    def _parse_node_block(
        self, node_id: str, allow_dangerous: bool
    ) -> tuple[bool, tuple[CombiningRule, ...]]:
        self._expect("{", "'{'")
        self._skip_separators()
        dangerous: bool | None = None
        rules: list[CombiningRule] = []
        while not self._check("}") and not self._check("eof"):
            key = self._expect_word("'rule'" + (" or 'dangerous'" if allow_dangerous else ""))
            if key.text == "rule":
                self._expect(":", "':'")
                rules.append(self._parse_rule(node_id, key))
            elif key.text == "dangerous" and allow_dangerous:
                if dangerous is not None:
                    raise self._error(key, "duplicate-id", "dangerous given twice")
                self._expect(":", "':'")
                dangerous = self._parse_bool(self._expect_word("true or false"))
                self._end_of_entry()
            else:
                raise self._error(
                    key, "unknown-keyword", f"unknown node key {key.text!r}"
                )
            self._skip_separators()
        self._expect("}", "'}'")
        self._end_of_entry()
        return bool(dangerous), tuple(rules)

    def _parse_rule(self, node_id: str, key_tok: _Token) -> CombiningRule:
        self._expect_keyword("if")
        atoms: list[RuleAtom] = [self._parse_rule_atom()]
        while self._at_word("and"):
            self._advance()
            atoms.append(self._parse_rule_atom())
        self._expect_keyword("then")
        output = self._parse_level(self._expect_word("a belief level"))
        self._end_of_entry()
        rule = CombiningRule(atoms=tuple(atoms), output=output)
        self.locations[f"{node_id}: {rule.unparse()}"] = self._location(key_tok)
        return rule

    def _parse_rule_atom(self) -> RuleAtom:
        source = self._expect_word("a source node")
        if self._check("="):
            self._advance()
            value = self._expect_word("a finding value")
            return ValueAtom(source=source.text, value=value.text)
        if self._at_word("at-least") or self._at_word("at-most"):
            mode = ThresholdMode.from_label(self._advance().text)
            bound = self._parse_level(self._expect_word("a belief level"))
            return BeliefAtom(source=source.text, mode=mode, bound=bound)
        tok = self._peek()
        raise self._error(
            tok,
            "syntax-error",
            f"expected '=', 'at-least', or 'at-most', found {tok.text!r}",
        )

    def _parse_link(self) -> None:
        source = self._expect_word("a source node")
        self._expect("->", "'->'")
        target = self._expect_word("a target node")
        self._expect_keyword("role")
        role_tok = self._expect_word("an evidence role")
        try:
            role = EvidenceRole.from_label(role_tok.text)
        except ValueError as exc:
            raise self._error(role_tok, "unknown-keyword", str(exc))
        self._end_of_entry()
        self.locations.setdefault(
            f"{source.text}->{target.text}", self._location(source)
        )
        self.links.append(EvidenceLink(source=source.text, target=target.text, role=role))

    def _parse_action(self) -> None:
        name_tok = self._expect_word("an action name")
        self._expect("{", "'{'")
        self._skip_separators()
        kind: ActionKind | None = None
        cost: CostVector | None = None
        yields: tuple[str, ...] = ()
        preconditions: list[Precondition] = []
        repeatable = False
        seen_keys: set[str] = set()
        while not self._check("}") and not self._check("eof"):
            key = self._expect_word("an action key")
            if key.text in seen_keys and key.text != "requires":
                raise self._error(key, "duplicate-id", f"{key.text!r} given twice")
            seen_keys.add(key.text)
            self._expect(":", "':'")
            if key.text == "kind":
                word = self._expect_word("question, test, or treatment")
                try:
                    kind = ActionKind.from_label(word.text)
                except ValueError as exc:
                    raise self._error(word, "unknown-keyword", str(exc))
            elif key.text == "cost":
                cost = self._parse_cost()
            elif key.text == "requires":
                node = self._expect_word("a node id")
                expression = self._parse_expr()
                preconditions.append(Precondition(node=node.text, expression=expression))
            elif key.text == "yields":
                yields = self._parse_word_list("a finding id")
            elif key.text == "repeatable":
                repeatable = self._parse_bool(self._expect_word("true or false"))
            else:
                raise self._error(
                    key, "unknown-keyword", f"unknown action key {key.text!r}"
                )
            self._end_of_entry()
            self._skip_separators()
        self._expect("}", "'}'")
        self._end_of_entry()
        missing = [
            label
            for label, value in (("kind", kind), ("cost", cost), ("yields", yields))
            if not value
        ]
        if missing:
            raise self._error(
                name_tok, "syntax-error", f"action lacks {', '.join(missing)}"
            )
        assert kind is not None and cost is not None
        self.locations[name_tok.text] = self._location(name_tok)
        self.actions.append(
            ActionSpec(
                id=name_tok.text,
                kind=kind,
                cost=cost,
                yields=yields,
                preconditions=tuple(preconditions),
                repeatable=repeatable,
            )
        )

    def _parse_cost(self) -> CostVector:
        self._expect("{", "'{'")
        grades: dict[str, CostGrade] = {}
        while True:
            dim = self._expect_word("a cost dimension")
            if dim.text not in COST_DIMENSIONS:
                raise self._error(
                    dim, "unknown-keyword", f"not a cost dimension: {dim.text!r}"
                )
            if dim.text in grades:
                raise self._error(dim, "duplicate-id", f"{dim.text!r} given twice")
            self._expect(":", "':'")
            grade = self._expect_word("a cost grade")
            try:
                grades[dim.text] = CostGrade.from_label(grade.text)
            except ValueError as exc:
                raise self._error(grade, "unknown-value", str(exc))
            if not self._check(","):
                break
            self._advance()
        end = self._expect("}", "'}'")
        missing = [d for d in COST_DIMENSIONS if d not in grades]
        if missing:
            raise self._error(end, "syntax-error", f"cost lacks dimension(s) {missing}")
        return CostVector(**grades)

    def _parse_strategy(self) -> None:
        name_tok = self._expect_word("a strategy name")
        if self.strategy is not None:
            raise self._error(name_tok, "duplicate-id", "strategy declared twice")
        self.locations["strategy"] = self._location(name_tok)
        self._expect("{", "'{'")
        self._skip_separators()
        fields: dict[str, tuple[str, ...]] = {}
        while not self._check("}") and not self._check("eof"):
            key = self._expect_word("'cost-priority' or 'presenting'")
            if key.text not in ("cost-priority", "presenting"):
                raise self._error(
                    key, "unknown-keyword", f"unknown strategy key {key.text!r}"
                )
            if key.text in fields:
                raise self._error(key, "duplicate-id", f"{key.text!r} given twice")
            self._expect(":", "':'")
            fields[key.text] = self._parse_word_list("an identifier")
            self._end_of_entry()
            self._skip_separators()
        self._expect("}", "'}'")
        self._end_of_entry()
        try:
            self.strategy = Strategy(
                name=name_tok.text,
                cost_priority=fields.get(
                    "cost-priority", ("risk", "monetary", "discomfort")
                ),
                presenting=fields.get("presenting", ()),
            )
        except ValueError as exc:
            raise self._error(name_tok, "unknown-value", str(exc))

    # shared pieces

    def _parse_word_list(self, what: str) -> tuple[str, ...]:
        words = [self._expect_word(what).text]
        while self._check(","):
            self._advance()
            words.append(self._expect_word(what).text)
        return tuple(words)

    def _parse_bool(self, tok: _Token) -> bool:
        if tok.text == "true":
            return True
        if tok.text == "false":
            return False
        raise self._error(
            tok, "unknown-value", f"expected true or false, found {tok.text!r}"
        )

    def _parse_level(self, tok: _Token) -> BeliefLevel:
        try:
            return BeliefLevel.from_label(tok.text)
        except ValueError as exc:
            raise self._error(tok, "unknown-value", str(exc))

    # parameter expressions

    def _parse_expr(self) -> Expr:
        items = [self._parse_and_expr()]
        while self._at_word("or"):
            self._advance()
            items.append(self._parse_and_expr())
        if len(items) == 1:
            return items[0]
        return Or(items=tuple(items))

    def _parse_and_expr(self) -> Expr:
        items = [self._parse_unary_expr()]
        while self._at_word("and"):
            self._advance()
            items.append(self._parse_unary_expr())
        if len(items) == 1:
            return items[0]
        return And(items=tuple(items))

    def _parse_unary_expr(self) -> Expr:
        if self._at_word("not"):
            self._advance()
            return Not(item=self._parse_unary_expr())
        if self._check("("):
            self._advance()
            expr = self._parse_expr()
            self._expect(")", "')'")
            return expr
        return self._parse_expr_atom()

    def _parse_expr_atom(self) -> Expr:
        name = self._expect_word("a parameter name")
        if self._check("=") or self._check("!="):
            op = self._advance().text
            value = self._parse_param_value(self._expect_word("a value"))
            return Comparison(name=name.text, op=op, value=value)
        if self._at_word("at-least") or self._at_word("at-most"):
            mode = ThresholdMode.from_label(self._advance().text)
            bound_tok = self._expect_word("an ordered value")
            bound = self._parse_param_value(bound_tok)
            if isinstance(bound, bool):
                raise self._error(
                    bound_tok, "unknown-value", "thresholds need an ordered value"
                )
            return Threshold(name=name.text, mode=mode, bound=bound)
        return ParamRef(name=name.text)

    def _parse_param_value(self, tok: _Token) -> ParamValue:
        if tok.text == "true":
            return True
        if tok.text == "false":
            return False
        try:
            return BeliefLevel.from_label(tok.text)
        except ValueError:
            pass
        try:
            return CostGrade.from_label(tok.text)
        except ValueError:
            pass
        raise self._error(
            tok,
            "unknown-value",
            f"{tok.text!r} is not a boolean, belief level, or cost grade",
        )


# -- serializer ---------------------------------------------------------------


def serialize_kb(kb: KnowledgeBase) -> str:
    """Render the canonical text form of a knowledge base.

    Categories appear in a fixed order (parameters, findings, clusters,
    hypotheses, links, actions, strategy) with one entry per line; the same
    document always serializes to byte-identical text.
    """
    chunks: list[str] = [f"kb {kb.name}"]

    for definition in kb.parameter_defs:
        if definition.expression is None:
            continue
        chunks.append(
            f"parameter {definition.name} on {definition.applies_to} = "
            f"{definition.expression.unparse()}"
        )

    for node in kb.nodes:
        if node.kind is not NodeKind.FINDING:
            continue
        assert node.domain is not None
        body = [f"  values: {', '.join(node.domain.values)}"]
        if node.domain.bins:
            rendered = ", ".join(
                f"{_format_bound(b.low)}..{_format_bound(b.high)} {b.label}"
                for b in node.domain.bins
            )
            body.append(f"  bins: {rendered}")
        chunks.append(_block(f"finding {node.id}", body))

    for node in kb.nodes:
        if node.kind is not NodeKind.CLUSTER:
            continue
        body = [f"  rule: {rule.unparse()}" for rule in node.rules]
        chunks.append(_block(f"cluster {node.id}", body))

    for node in kb.nodes:
        if node.kind is not NodeKind.HYPOTHESIS:
            continue
        body = [f"  dangerous: {'true' if node.dangerous else 'false'}"]
        body.extend(f"  rule: {rule.unparse()}" for rule in node.rules)
        chunks.append(_block(f"hypothesis {node.id}", body))

    for link in kb.links:
        chunks.append(f"link {link.source} -> {link.target} role {link.role.label}")

    for action in kb.actions:
        cost = ", ".join(
            f"{dim}: {action.cost.dimension(dim).label}" for dim in COST_DIMENSIONS
        )
        body = [f"  kind: {action.kind.value}", f"  cost: {{ {cost} }}"]
        body.extend(
            f"  requires: {precondition.unparse()}"
            for precondition in action.preconditions
        )
        body.append(f"  yields: {', '.join(action.yields)}")
        if action.repeatable:
            body.append("  repeatable: true")
        chunks.append(_block(f"action {action.id}", body))

    if kb.strategy != Strategy():
        body = [f"  cost-priority: {', '.join(kb.strategy.cost_priority)}"]
        if kb.strategy.presenting:
            body.append(f"  presenting: {', '.join(kb.strategy.presenting)}")
        chunks.append(_block(f"strategy {kb.strategy.name}", body))

    return "\n\n".join(chunks) + "\n"


def _block(header: str, body: list[str]) -> str:
    if not body:
        return f"{header} {{\n}}"
    inner = "\n".join(body)
    return f"{header} {{\n{inner}\n}}"


def _format_bound(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return str(value)
