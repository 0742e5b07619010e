/** Consultation history: the trace document rendered as control cycles
 * followed by the raw event log. */

import { TraceDoc, TraceEntryDoc } from "./api.js";
import { el } from "./dom.js";

function observationText(observed: Record<string, string>): string {
  const pairs = Object.entries(observed);
  if (pairs.length === 0) return "no answer";
  return pairs.map(([finding, value]) => `${finding} = ${value}`).join(", ");
}

function entryItem(entry: TraceEntryDoc): HTMLElement {
  return el(
    "li",
    { class: "cycle", "data-cycle": String(entry.cycle) },
    el(
      "div",
      { class: "cycle-head" },
      el("strong", {}, `cycle ${entry.cycle}`),
      entry.focus !== null
        ? el("span", { class: "focus" }, ` focus ${entry.focus.node} (${entry.focus.tier})`)
        : null,
      el("span", { class: "action" }, ` → ${entry.action}`),
    ),
    el("div", { class: "observed" }, observationText(entry.observed)),
    el(
      "ul",
      { class: "diff" },
      ...entry.diff.map(([node, before, after]) =>
        el("li", { "data-node": node }, `${node}: ${before} → ${after}`),
      ),
    ),
  );
}

export function renderTimeline(trace: TraceDoc): HTMLElement {
  const presenting = Object.entries(trace.presenting)
    .map(([finding, value]) => `${finding} = ${value}`)
    .join(", ");
  return el(
    "div",
    { class: "timeline" },
    el("h3", {}, "history"),
    el("p", { class: "presenting" }, presenting === "" ? "no presenting findings" : `presenting: ${presenting}`),
    el("ol", { class: "cycles" }, ...trace.entries.map(entryItem)),
    trace.disposition !== null
      ? el(
          "p",
          { class: "trace-disposition" },
          `disposition: ${trace.disposition}` +
            (trace.resolved.length > 0 ? ` (${trace.resolved.join(", ")})` : ""),
        )
      : null,
    el(
      "details",
      { class: "event-log" },
      el("summary", {}, `event log (${trace.events.length})`),
      el(
        "table",
        {},
        el(
          "tbody",
          {},
          ...trace.events.map((event) =>
            el(
              "tr",
              { class: `event event-${event.kind}` },
              el("td", {}, String(event.sequence)),
              el("td", {}, event.timestamp),
              el("td", {}, event.kind),
            ),
          ),
        ),
      ),
    ),
  );
}
