/** View-model for one consultation session.
 *
 * Owns the polling-refreshed copy of the server documents, serializes
 * mutations (at most one POST in flight; further attempts are refused until
 * it settles), and turns failures into a dismissable error document for the
 * banner. No engine values are computed here — the view is exactly what the
 * service last said.
 */

import {
  ApiError,
  ErrorDoc,
  MuClient,
  NextStep,
  QueryRequest,
  QueryResult,
  StateDoc,
  TraceDoc,
} from "./api.js";

export interface SessionView {
  state: StateDoc | null;
  next: NextStep | null;
  trace: TraceDoc | null;
  lastQuery: QueryResult | null;
  error: ErrorDoc | null;
  busy: boolean;
}

function toErrorDoc(failure: unknown): ErrorDoc {
  if (failure instanceof ApiError) return failure.toDoc();
  const message = failure instanceof Error ? failure.message : String(failure);
  return { code: "connection-error", message };
}

export class SessionController {
  readonly view: SessionView = {
    state: null,
    next: null,
    trace: null,
    lastQuery: null,
    error: null,
    busy: false,
  };

  private listeners: (() => void)[] = [];
  private refreshing = false;

  constructor(
    private readonly client: MuClient,
    readonly sessionId: string,
  ) {}

  /** Create a server session and a controller already holding its state. */
  static async start(client: MuClient, kb: string): Promise<SessionController> {
    const state = await client.createSession(kb);
    const controller = new SessionController(client, state.id);
    controller.view.state = state;
    return controller;
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  dismissError(): void {
    if (this.view.error === null) return;
    this.view.error = null;
    this.emit();
  }

  /** Re-fetch state, next step, and trace. Safe to call from a poll timer:
   * overlapping calls and polls during a mutation are skipped. */
  async refresh(): Promise<void> {
    if (this.refreshing || this.view.busy) return;
    this.refreshing = true;
    try {
      await this.pull();
    } catch (failure) {
      this.view.error = toErrorDoc(failure);
    } finally {
      this.refreshing = false;
      this.emit();
    }
  }

  /** Record one observation. Returns false (without touching the server)
   * if another mutation is still in flight; true once recorded. */
  async submitFinding(finding: string, value: string | number | boolean): Promise<boolean> {
    return this.mutate(async () => {
      await this.client.recordFinding(this.sessionId, finding, value);
    });
  }

  /** Run a what-if query; the result lands in view.lastQuery. */
  async runQuery(request: QueryRequest): Promise<boolean> {
    return this.mutate(async () => {
      this.view.lastQuery = await this.client.query(this.sessionId, request);
    });
  }

  /** The next step is read first: computing it is what moves the session
   * to a disposition, so reading state afterwards keeps the status chip
   * consistent with the outcome panel. */
  private async pull(): Promise<void> {
    this.view.next = await this.client.recommendation(this.sessionId);
    this.view.state = await this.client.state(this.sessionId);
    this.view.trace = await this.client.trace(this.sessionId);
  }

  private async mutate(operation: () => Promise<void>): Promise<boolean> {
    if (this.view.busy) return false;
    this.view.busy = true;
    this.view.error = null;
    this.emit();
    try {
      await operation();
      await this.pull();
      return true;
    } catch (failure) {
      this.view.error = toErrorDoc(failure);
      return false;
    } finally {
      this.view.busy = false;
      this.emit();
    }
  }
}
