"""Command-line entry points: validate, run, consult, query, serve.

Exit codes follow one convention everywhere: 0 on success, 1 when the
input fails validation (bad KB, unknown name, malformed patient file), and
2 when a run fails at runtime.
"""

from __future__ import annotations

import functools
import json
import sys
from importlib import metadata
from pathlib import Path
from typing import Any

import click

from .bundled import BUNDLED_NAMES, bundled_kb
from .kblang import (
    Diagnostic,
    KbParseError,
    KnowledgeBase,
    diagnostics_from_violations,
    load_kb,
)
from .network import (
    Network,
    NetworkValidationError,
    OutOfDomainError,
    UnknownFindingError,
    UnknownNodeError,
    propagate,
)
from .queries import InvalidQueryError, UnknownParameterError
from .planner import (
    PatientModel,
    candidate_actions,
    choose_action,
    run_workup,
    select_focus,
)
from .protocol import beliefs_to_json, trace_to_dict
from .session import SessionStore, execute_query

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class CliValidationError(Exception):
    """Bad input caught before the engine runs (exit code 1)."""


# Engine errors that mean the *input* was wrong (bad name, bad value, bad
# query) rather than that a computation failed; they share exit code 1.
INPUT_ERRORS = (
    CliValidationError,
    OutOfDomainError,
    UnknownFindingError,
    UnknownNodeError,
    UnknownParameterError,
    InvalidQueryError,
)


def _echo_diagnostics(diagnostics: list[Diagnostic]) -> None:
    for diagnostic in diagnostics:
        click.echo(str(diagnostic), err=True)


def guarded(fn):
    """Translate failures into the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except KbParseError as exc:
            _echo_diagnostics(exc.diagnostics)
            sys.exit(EXIT_VALIDATION)
        except INPUT_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except (
            click.ClickException,
            click.exceptions.Exit,
            click.exceptions.Abort,
            KeyboardInterrupt,
        ):
            raise
        except SystemExit:
            raise
        except Exception as exc:
            click.echo(f"runtime error: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)

    return wrapper


class EntryGroup(click.Group):
    """Group whose usage errors follow the CLI's exit-code convention.

    Click exits 2 on usage errors by default; here every bad input —
    including misspelled options and missing arguments — exits 1, leaving 2
    to mean a genuine runtime failure.
    """

    def main(self, *args: Any, **kwargs: Any) -> Any:
        kwargs.pop("standalone_mode", None)
        try:
            return super().main(*args, standalone_mode=False, **kwargs)
        except click.exceptions.Exit as exc:
            sys.exit(exc.exit_code)
        except click.UsageError as exc:
            exc.show()
            sys.exit(EXIT_VALIDATION)
        except click.ClickException as exc:
            exc.show()
            sys.exit(exc.exit_code)
        except click.exceptions.Abort:
            click.echo("aborted", err=True)
            sys.exit(EXIT_VALIDATION)


def _resolve_kb(ref: str) -> tuple[KnowledgeBase, str]:
    """A KB argument is a file path, or the name of a bundled KB."""
    path = Path(ref)
    if path.exists():
        return load_kb(path), str(path)
    if ref in BUNDLED_NAMES:
        return bundled_kb(ref), f"bundled:{ref}.mu"
    raise CliValidationError(
        f"no knowledge base file or bundled name {ref!r} "
        f"(bundled: {', '.join(BUNDLED_NAMES)})"
    )


def _build(kb: KnowledgeBase, filename: str) -> Network:
    try:
        return kb.build()
    except NetworkValidationError as exc:
        raise KbParseError(
            diagnostics_from_violations(kb, exc.violations, filename)
        ) from exc


def _coerce_scalar(raw: str) -> Any:
    """Recover numbers from option/prompt text so binned domains work.

    Everything else stays a string; boolean words are already domain labels.
    """
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def _load_patient(path: str) -> PatientModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliValidationError(f"cannot read patient file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliValidationError(f"patient file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not all(isinstance(k, str) for k in doc):
        raise CliValidationError("patient file must be a flat JSON object")
    return PatientModel(doc)


@click.group(cls=EntryGroup)
@click.version_option(metadata.version("mu-engine"), prog_name="mu")
def main() -> None:
    """Qualitative belief engine for evidence-driven consultations."""


@main.command()
@click.argument("kb_ref", metavar="KB")
@guarded
def validate(kb_ref: str) -> None:
    """Parse and structurally check a knowledge base."""
    kb, filename = _resolve_kb(kb_ref)
    network = _build(kb, filename)
    click.echo(
        f"ok: {kb.name}: {len(network.nodes)} nodes, "
        f"{len(network.links)} links, {len(network.actions)} actions"
    )


@main.command()
@click.argument("kb_ref", metavar="KB")
@click.option("--patient", "patient_path", required=True, type=click.Path(), help="Flat JSON file of finding values.")
@click.option("--trace", "trace_path", type=click.Path(), help="Write the trace document here (otherwise stdout).")
@click.option("--cycle-limit", default=50, show_default=True, help="Maximum control-loop cycles.")
@guarded
def run(kb_ref: str, patient_path: str, trace_path: str | None, cycle_limit: int) -> None:
    """Run a full batch workup against a patient file."""
    kb, filename = _resolve_kb(kb_ref)
    network = _build(kb, filename)
    patient = _load_patient(patient_path)
    trace = run_workup(network, patient, cycle_limit=cycle_limit)
    doc = trace_to_dict(trace, kb=kb.name, beliefs=beliefs_to_json(network.beliefs))
    rendered = json.dumps(doc, indent=2) + "\n"
    if trace_path:
        Path(trace_path).write_text(rendered, encoding="utf-8")
        for entry in trace.entries:
            focus = entry.focus.node_id if entry.focus else "-"
            click.echo(
                f"cycle {entry.cycle}: focus={focus} action={entry.action_id} "
                f"observed={entry.observed}"
            )
        resolved = f" ({', '.join(trace.resolved)})" if trace.resolved else ""
        click.echo(f"disposition: {trace.disposition}{resolved}")
    else:
        click.echo(rendered, nl=False)


def _ask(network: Network, finding: str, patient: PatientModel | None) -> Any:
    """One finding's value: from the patient file, or an interactive prompt."""
    if patient is not None:
        answer = patient.answer(finding)
        if answer is not None:
            click.echo(f"    {finding} = {answer}")
        return answer
    domain = network.nodes[finding].domain
    raw = click.prompt(
        f"    {finding} [{'/'.join(domain.values)}] (blank to skip)",
        default="",
        show_default=False,
    ).strip()
    if not raw:
        return None
    try:
        return network.normalize_value(finding, _coerce_scalar(raw))
    except Exception as exc:
        click.echo(f"    ignored: {exc}", err=True)
        return None


def _incorporate(network: Network, observed: dict[str, Any]) -> None:
    if not observed:
        return
    merged = dict(network.observations)
    merged.update(observed)
    result = propagate(network, merged)
    for node_id, old, new in result.diff:
        click.echo(f"    belief {node_id}: {old.label} -> {new.label}")


@main.command()
@click.argument("kb_ref", metavar="KB")
@click.option("--patient", "patient_path", type=click.Path(), help="Answer prompts from this file instead of asking.")
@click.option("--cycle-limit", default=50, show_default=True)
@guarded
def consult(kb_ref: str, patient_path: str | None, cycle_limit: int) -> None:
    """Interactive consultation: recommendations in, findings out."""
    kb, filename = _resolve_kb(kb_ref)
    network = _build(kb, filename)
    patient = _load_patient(patient_path) if patient_path else None
    if network.strategy.presenting:
        click.echo("presenting findings:")
        seed: dict[str, Any] = {}
        for finding in network.strategy.presenting:
            value = _ask(network, finding, patient)
            if value is not None:
                seed[finding] = value
        _incorporate(network, seed)
    performed: set[str] = set()
    for cycle in range(1, cycle_limit + 1):
        focus = select_focus(network)
        if focus is None:
            break
        candidates = candidate_actions(network, focus.node_id, performed)
        if not candidates:
            break
        action = choose_action(candidates, network.strategy)
        cost = ", ".join(
            f"{dim}={grade}" for dim, grade in action.cost.to_dict().items()
        )
        click.echo(f"[{cycle}] focus {focus.node_id} ({focus.tier}): {focus.rationale}")
        click.echo(f"    do {action.id} ({action.kind.value}; {cost})")
        performed.add(action.id)
        observed: dict[str, Any] = {}
        for finding in action.yields:
            if finding in network.observations:
                continue
            value = _ask(network, finding, patient)
            if value is not None:
                observed[finding] = value
        _incorporate(network, observed)
    resolved = [
        node.id
        for node in network.hypotheses()
        if network.beliefs[node.id].label in ("confirmed", "disconfirmed")
    ]
    click.echo(
        "done: "
        + (
            ", ".join(
                f"{node_id}={network.beliefs[node_id].label}" for node_id in resolved
            )
            if resolved
            else "no hypothesis resolved"
        )
    )


@main.group()
@click.argument("kb_ref", metavar="KB")
@click.option("--observe", "-o", "observations", multiple=True, metavar="FINDING=VALUE", help="Observation applied before the query (repeatable).")
@click.pass_context
@guarded
def query(ctx: click.Context, kb_ref: str, observations: tuple[str, ...]) -> None:
    """Ask one of the five query classes about a knowledge base."""
    kb, filename = _resolve_kb(kb_ref)
    network = _build(kb, filename)
    if observations:
        parsed: dict[str, Any] = {}
        for item in observations:
            if "=" not in item:
                raise CliValidationError(f"--observe expects FINDING=VALUE, got {item!r}")
            finding, _, value = item.partition("=")
            parsed[finding.strip()] = _coerce_scalar(value.strip())
        propagate(network, parsed)
    ctx.obj = network


def _echo_result(result: dict[str, Any]) -> None:
    click.echo(json.dumps(result, indent=2))


@query.command("state")
@click.argument("subject")
@click.argument("parameter")
@click.pass_obj
@guarded
def query_state_cmd(network: Network, subject: str, parameter: str) -> None:
    """Current value of one control parameter."""
    _echo_result(
        execute_query(
            network, {"class": "state", "subject": subject, "parameter": parameter}
        )
    )


@query.command("change")
@click.argument("target")
@click.argument("direction", type=click.Choice(["increase", "decrease"]))
@click.option("--ceiling", help='Cost ceiling, e.g. \'{"monetary": "low", "risk": "low", "discomfort": "low"}\'.')
@click.option("--bound", type=int, help="Completion-count bound for enumeration.")
@click.pass_obj
@guarded
def query_change_cmd(
    network: Network, target: str, direction: str, ceiling: str | None, bound: int | None
) -> None:
    """Minimal plans that move a node's belief."""
    request: dict[str, Any] = {"class": "change", "target": target, "direction": direction}
    if ceiling:
        try:
            request["ceiling"] = json.loads(ceiling)
        except json.JSONDecodeError as exc:
            raise CliValidationError(f"--ceiling is not valid JSON: {exc}") from exc
    if bound:
        request["bound"] = bound
    _echo_result(execute_query(network, request))


@query.command("focus")
@click.option("--kind", type=click.Choice(["finding", "cluster", "hypothesis"]))
@click.option("--expression", help='Parameter filter, e.g. "triggered and dangerous".')
@click.option("--supports", help="Only nodes directly supporting this target.")
@click.option("--detracts", help="Only nodes directly detracting from this target.")
@click.pass_obj
@guarded
def query_focus_cmd(
    network: Network,
    kind: str | None,
    expression: str | None,
    supports: str | None,
    detracts: str | None,
) -> None:
    """Nodes currently satisfying a predicate."""
    request: dict[str, Any] = {"class": "focus"}
    if kind:
        request["kind"] = kind
    if expression:
        request["expression"] = expression
    if supports:
        request["supports"] = supports
    if detracts:
        request["detracts"] = detracts
    _echo_result(execute_query(network, request))


@query.command("effect")
@click.argument("finding")
@click.option("--mode", type=click.Choice(["syntactic", "semantic"]), default="syntactic", show_default=True)
@click.option("--bound", type=int)
@click.pass_obj
@guarded
def query_effect_cmd(network: Network, finding: str, mode: str, bound: int | None) -> None:
    """Nodes a finding can influence."""
    request: dict[str, Any] = {"class": "effect", "finding": finding, "mode": mode}
    if bound:
        request["bound"] = bound
    _echo_result(execute_query(network, request))


@query.command("discriminate")
@click.argument("first")
@click.argument("second")
@click.option("--mode", type=click.Choice(["auto", "heuristic", "semantic"]), default="auto", show_default=True)
@click.option("--bound", type=int)
@click.pass_obj
@guarded
def query_discriminate_cmd(
    network: Network, first: str, second: str, mode: str, bound: int | None
) -> None:
    """Findings and clusters that tell two hypotheses apart."""
    request: dict[str, Any] = {
        "class": "discriminate",
        "first": first,
        "second": second,
        "mode": mode,
    }
    if bound:
        request["bound"] = bound
    _echo_result(execute_query(network, request))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--data-dir", default="./mu-sessions", show_default=True, type=click.Path(), help="Directory for session event logs.")
@click.option("--kb", "kb_paths", multiple=True, type=click.Path(exists=True), help="Extra .mu files to serve (repeatable).")
@guarded
def serve(host: str, port: int, data_dir: str, kb_paths: tuple[str, ...]) -> None:
    """Serve the /v1 consultation protocol over HTTP."""
    import uvicorn

    from .service import create_app

    store = SessionStore(data_dir)
    for path in kb_paths:
        kb = load_kb(path)
        _build(kb, path)
        store.register_kb(kb.name, Path(path).read_text(encoding="utf-8"))
    store.load()
    click.echo(f"serving {', '.join(store.kb_names())} on http://{host}:{port}/v1")
    uvicorn.run(create_app(store), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
