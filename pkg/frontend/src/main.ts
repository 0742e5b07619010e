/** Dashboard bootstrap: wires the controller to the render modules.
 *
 * One poll timer refreshes the documents; all mutations go through the
 * controller, which admits a single in-flight request and exposes failures
 * as a dismissable banner.
 */

import { MuClient } from "./api.js";
import { SessionController } from "./controller.js";
import {
  renderBeliefs,
  renderErrorBanner,
  renderFindingForm,
  renderNextStep,
  renderStatus,
} from "./dashboard.js";
import { el, replaceChildrenOf } from "./dom.js";
import { renderTimeline } from "./timeline.js";
import { renderQueryResult, renderWhatIfForm } from "./whatif.js";

const POLL_INTERVAL_MS = 2_000;

function renderSession(root: HTMLElement, controller: SessionController): void {
  const view = controller.view;
  const pieces: (HTMLElement | null)[] = [];
  if (view.error !== null) {
    pieces.push(renderErrorBanner(view.error, () => controller.dismissError()));
  }
  if (view.state !== null) {
    const state = view.state;
    pieces.push(renderStatus(state));
    const left = el("div", { class: "column" }, renderBeliefs(state));
    const right = el("div", { class: "column" });
    if (view.next !== null) {
      right.append(renderNextStep(view.next));
    }
    if (state.status !== "terminated") {
      right.append(
        renderFindingForm(state, view.next, view.busy, (finding, value) => {
          void controller.submitFinding(finding, value);
        }),
      );
    }
    right.append(
      renderWhatIfForm(state, view.busy, (request) => {
        void controller.runQuery(request);
      }),
    );
    if (view.lastQuery !== null) {
      right.append(renderQueryResult(view.lastQuery));
    }
    if (view.trace !== null) {
      right.append(renderTimeline(view.trace));
    }
    pieces.push(el("div", { class: "columns" }, left, right));
  }
  replaceChildrenOf(root, ...pieces);
}

async function startSession(
  root: HTMLElement,
  client: MuClient,
  kb: string,
): Promise<void> {
  const controller = await SessionController.start(client, kb);
  controller.onChange(() => renderSession(root, controller));
  await controller.refresh();
  setInterval(() => {
    void controller.refresh();
  }, POLL_INTERVAL_MS);
}

/** Mount the dashboard. `baseUrl` is the service origin, e.g.
 * "http://127.0.0.1:8000". */
export async function bootstrap(root: HTMLElement, baseUrl: string): Promise<void> {
  const client = new MuClient(baseUrl);
  const sessionRoot = el("div", { class: "session" });

  const kbSelect = el("select", { class: "kb-select" });
  try {
    for (const kb of await client.listKbs()) {
      kbSelect.append(el("option", { value: kb }, kb));
    }
  } catch (failure) {
    const message = failure instanceof Error ? failure.message : String(failure);
    replaceChildrenOf(
      root,
      el(
        "div",
        { class: "banner error-banner", role: "alert" },
        el("strong", {}, "connection-error"),
        el("span", { class: "message" }, `cannot reach ${baseUrl}/v1: ${message}`),
      ),
    );
    return;
  }

  const startButton = el("button", { class: "start", type: "submit" }, "start session");
  const startForm = el(
    "form",
    { class: "start-form" },
    el("label", {}, "knowledge base: "),
    kbSelect,
    startButton,
  );
  startForm.addEventListener("submit", (event) => {
    event.preventDefault();
    startButton.setAttribute("disabled", "disabled");
    void startSession(sessionRoot, client, kbSelect.value).catch((failure) => {
      startButton.removeAttribute("disabled");
      const message = failure instanceof Error ? failure.message : String(failure);
      replaceChildrenOf(
        sessionRoot,
        el(
          "div",
          { class: "banner error-banner", role: "alert" },
          el("strong", {}, "session-error"),
          el("span", { class: "message" }, message),
        ),
      );
    });
  });

  replaceChildrenOf(root, el("header", {}, el("h1", {}, "mu dashboard"), startForm), sessionRoot);
}
