/** Session panels: status, belief table, next step, and the finding form.
 *
 * Every label, level, score, and cost grade shown here is copied verbatim
 * from a service document.
 */

import {
  ActionRow,
  CostVector,
  ErrorDoc,
  NextStep,
  NodeRow,
  StateDoc,
} from "./api.js";
import { el } from "./dom.js";

export function costText(cost: CostVector): string {
  return `monetary=${cost.monetary} risk=${cost.risk} discomfort=${cost.discomfort}`;
}

export function renderErrorBanner(error: ErrorDoc, onDismiss: () => void): HTMLElement {
  const dismiss = el("button", { class: "dismiss", type: "button" }, "dismiss");
  dismiss.addEventListener("click", onDismiss);
  return el(
    "div",
    { class: "banner error-banner", role: "alert", "data-code": error.code },
    el("strong", {}, error.code),
    el("span", { class: "message" }, error.message),
    error.location ? el("code", { class: "location" }, error.location) : null,
    dismiss,
  );
}

export function renderStatus(state: StateDoc): HTMLElement {
  const parts: (HTMLElement | null)[] = [
    el("span", { class: "kb" }, state.kb),
    el("span", { class: `status status-${state.status}` }, state.status),
    el("code", { class: "session-id" }, state.id.slice(0, 8)),
  ];
  if (state.disposition !== null) {
    parts.push(el("span", { class: "disposition" }, state.disposition));
  }
  for (const node of state.resolved) {
    parts.push(el("span", { class: "resolved" }, `${node}: ${state.beliefs[node]}`));
  }
  return el("div", { class: "status-bar" }, ...parts);
}

function beliefBadge(node: NodeRow): HTMLElement {
  return el("span", { class: `belief belief-${node.belief}` }, node.belief);
}

function nodeMarks(node: NodeRow): string {
  const marks: string[] = [];
  if (node.critical) marks.push("critical");
  if (node.dangerous) marks.push("dangerous");
  if (node.triggered) marks.push("triggered");
  return marks.join(", ");
}

function nodeRow(node: NodeRow): HTMLElement {
  const detail =
    node.kind === "finding"
      ? node.observed
        ? `= ${node.value}`
        : `(${(node.domain ?? []).join(" | ")})`
      : nodeMarks(node);
  return el(
    "tr",
    { class: `node node-${node.kind}`, "data-node": node.id },
    el("td", { class: "node-id" }, node.id),
    el("td", {}, beliefBadge(node)),
    el("td", { class: "node-detail" }, detail),
  );
}

export function renderBeliefs(state: StateDoc): HTMLElement {
  const sections: HTMLElement[] = [];
  const order: [NodeRow["kind"], string][] = [
    ["hypothesis", "hypotheses"],
    ["cluster", "clusters"],
    ["finding", "findings"],
  ];
  for (const [kind, title] of order) {
    const rows = state.nodes.filter((node) => node.kind === kind);
    if (rows.length === 0) continue;
    sections.push(
      el(
        "section",
        { class: `nodes nodes-${kind}` },
        el("h3", {}, title),
        el("table", {}, el("tbody", {}, ...rows.map(nodeRow))),
      ),
    );
  }
  return el("div", { class: "beliefs" }, ...sections);
}

function actionSummary(action: ActionRow): HTMLElement {
  return el(
    "div",
    { class: "action", "data-action": action.id },
    el("strong", {}, action.id),
    el("span", { class: "action-kind" }, ` (${action.kind})`),
    el("div", { class: "action-cost" }, costText(action.cost)),
    el("div", { class: "action-yields" }, `yields: ${action.yields.join(", ")}`),
    action.preconditions.length > 0
      ? el("div", { class: "action-preconditions" }, `requires: ${action.preconditions.join("; ")}`)
      : null,
  );
}

export function renderNextStep(next: NextStep): HTMLElement {
  if (next.kind === "disposition") {
    return el(
      "div",
      { class: "next-step disposition-panel", "data-disposition": next.disposition },
      el("h3", {}, "outcome"),
      el("p", { class: "disposition" }, next.disposition),
      next.resolved.length > 0
        ? el("p", { class: "resolved" }, `resolved: ${next.resolved.join(", ")}`)
        : null,
      el("p", { class: "rationale" }, next.rationale),
    );
  }
  return el(
    "div",
    { class: "next-step recommendation-panel" },
    el("h3", {}, "recommended next step"),
    el(
      "p",
      { class: "focus", "data-focus": next.focus.node },
      `focus: ${next.focus.node} (${next.focus.tier}) — ${next.focus.rationale}`,
    ),
    actionSummary(next.action),
    el(
      "ul",
      { class: "candidates" },
      ...next.candidates.map(([id, score]) =>
        el("li", { "data-candidate": id }, `${id} (score ${score})`),
      ),
    ),
    el("p", { class: "rationale" }, next.rationale),
  );
}

/** Observation form: pick a finding, pick one of its domain values, submit.
 * The recommended action's still-unobserved yields are listed first. */
export function renderFindingForm(
  state: StateDoc,
  next: NextStep | null,
  busy: boolean,
  onSubmit: (finding: string, value: string) => void,
): HTMLElement {
  const findings = state.nodes.filter((node) => node.kind === "finding");
  const wanted = new Set(
    next !== null && next.kind === "recommendation"
      ? next.action.yields.filter((id) => !(id in state.observations))
      : [],
  );
  const ordered = [
    ...findings.filter((node) => wanted.has(node.id)),
    ...findings.filter((node) => !wanted.has(node.id)),
  ];

  const findingSelect = el("select", { class: "finding-select", name: "finding" });
  for (const node of ordered) {
    const label = wanted.has(node.id) ? `${node.id} (asked)` : node.id;
    findingSelect.append(el("option", { value: node.id }, label));
  }

  const valueSelect = el("select", { class: "value-select", name: "value" });
  const fillValues = () => {
    valueSelect.replaceChildren();
    const chosen = findings.find((node) => node.id === findingSelect.value);
    for (const value of chosen?.domain ?? []) {
      valueSelect.append(el("option", { value }, value));
    }
  };
  fillValues();
  findingSelect.addEventListener("change", fillValues);

  const submit = el("button", { class: "record", type: "submit" }, "record");
  if (busy) submit.setAttribute("disabled", "disabled");

  const form = el(
    "form",
    { class: "finding-form" },
    el("h3", {}, "record a finding"),
    findingSelect,
    valueSelect,
    submit,
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (findingSelect.value !== "" && valueSelect.value !== "") {
      onSubmit(findingSelect.value, valueSelect.value);
    }
  });
  return form;
}
