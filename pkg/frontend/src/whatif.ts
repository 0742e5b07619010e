/** What-if panel: build query requests from form input and render the
 * result documents. All analysis happens server-side; this module only
 * displays what came back. */

import { ChangePlan, QueryRequest, QueryResult, StateDoc } from "./api.js";
import { costText } from "./dashboard.js";
import { el } from "./dom.js";

function planRow(plan: ChangePlan): HTMLElement {
  const assignments = Object.entries(plan.assignments)
    .map(([finding, value]) => `${finding} = ${value}`)
    .join(", ");
  return el(
    "li",
    { class: "plan" },
    el("span", { class: "assignments" }, assignments),
    el(
      "span",
      { class: "outcome" },
      ` → ${plan["resulting-belief"]} (Δrank ${plan["rank-change"]})`,
    ),
    el("div", { class: "plan-actions" }, `via: ${plan.actions.join(", ") || "(no action)"}`),
    el("div", { class: "plan-cost" }, costText(plan.cost)),
  );
}

function nodeChips(ids: string[], kind: string): HTMLElement {
  if (ids.length === 0) return el("p", { class: `${kind} empty` }, "(none)");
  return el(
    "ul",
    { class: kind },
    ...ids.map((id) => el("li", { "data-node": id }, id)),
  );
}

export function renderQueryResult(result: QueryResult): HTMLElement {
  switch (result.class) {
    case "state":
      return el(
        "div",
        { class: "query-result result-state" },
        el("p", {}, `${result.subject}.${result.parameter} = ${String(result.value)}`),
      );
    case "change":
      return el(
        "div",
        { class: "query-result result-change" },
        el("p", {}, `${result.plans.length} plan(s) to ${result.direction} ${result.target}`),
        el("ol", { class: "plans" }, ...result.plans.map(planRow)),
      );
    case "focus":
      return el(
        "div",
        { class: "query-result result-focus" },
        nodeChips(result.nodes, "focus-nodes"),
      );
    case "effect":
      return el(
        "div",
        { class: "query-result result-effect" },
        el("p", {}, `${result.finding} can influence (${result.mode}):`),
        nodeChips(result.nodes, "effect-nodes"),
      );
    case "discriminate":
      return el(
        "div",
        { class: "query-result result-discriminate" },
        el("p", {}, `separating ${result.first} from ${result.second} (${result.mode}):`),
        nodeChips(result.discriminators, "discriminators"),
      );
  }
}

/** The query builder: one row of selects whose shape follows the chosen
 * query class; submitting hands a ready QueryRequest to the caller. */
export function renderWhatIfForm(
  state: StateDoc,
  busy: boolean,
  onRun: (request: QueryRequest) => void,
): HTMLElement {
  const hypotheses = state.nodes.filter((node) => node.kind === "hypothesis");
  const findings = state.nodes.filter((node) => node.kind === "finding");

  const classSelect = el("select", { class: "query-class", name: "class" });
  for (const name of ["change", "discriminate", "effect", "state", "focus"]) {
    classSelect.append(el("option", { value: name }, name));
  }

  const fields = el("span", { class: "query-fields" });

  const select = (cls: string, ids: string[]): HTMLSelectElement => {
    const node = el("select", { class: cls });
    for (const id of ids) node.append(el("option", { value: id }, id));
    return node;
  };

  let buildRequest: () => QueryRequest | null = () => null;

  const rebuildFields = () => {
    fields.replaceChildren();
    const hypothesisIds = hypotheses.map((node) => node.id);
    const everyNodeId = state.nodes.map((node) => node.id);
    switch (classSelect.value) {
      case "change": {
        const target = select("target", hypothesisIds);
        const direction = select("direction", ["increase", "decrease"]);
        fields.append(target, direction);
        buildRequest = () => ({
          class: "change",
          target: target.value,
          direction: direction.value as "increase" | "decrease",
        });
        break;
      }
      case "discriminate": {
        const first = select("first", hypothesisIds);
        const second = select("second", hypothesisIds);
        fields.append(first, second);
        buildRequest = () => ({
          class: "discriminate",
          first: first.value,
          second: second.value,
        });
        break;
      }
      case "effect": {
        const finding = select("finding", findings.map((node) => node.id));
        const mode = select("mode", ["syntactic", "semantic"]);
        fields.append(finding, mode);
        buildRequest = () => ({
          class: "effect",
          finding: finding.value,
          mode: mode.value as "syntactic" | "semantic",
        });
        break;
      }
      case "state": {
        const subject = select("subject", everyNodeId);
        const parameter = el("input", {
          class: "parameter",
          type: "text",
          value: "belief",
        });
        fields.append(subject, parameter);
        buildRequest = () => ({
          class: "state",
          subject: subject.value,
          parameter: parameter.value,
        });
        break;
      }
      case "focus": {
        const expression = el("input", {
          class: "expression",
          type: "text",
          value: "triggered",
        });
        fields.append(expression);
        buildRequest = () => ({ class: "focus", expression: expression.value });
        break;
      }
    }
  };
  rebuildFields();
  classSelect.addEventListener("change", rebuildFields);

  const run = el("button", { class: "run-query", type: "submit" }, "run");
  if (busy) run.setAttribute("disabled", "disabled");

  const form = el(
    "form",
    { class: "whatif-form" },
    el("h3", {}, "what-if"),
    classSelect,
    fields,
    run,
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const request = buildRequest();
    if (request !== null) onRun(request);
  });
  return form;
}
