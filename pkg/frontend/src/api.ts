/** Typed client for the mu consultation service's /v1 protocol.
 *
 * Everything the dashboard shows comes verbatim from these documents; the
 * client never derives or recomputes engine values.
 */

export type BeliefLabel =
  | "disconfirmed"
  | "strongly-detracted"
  | "detracted"
  | "unknown"
  | "supported"
  | "strongly-supported"
  | "confirmed";

export type CostGrade = "free" | "low" | "moderate" | "high" | "very-high";

export interface CostVector {
  monetary: CostGrade;
  risk: CostGrade;
  discomfort: CostGrade;
}

export type NodeKind = "finding" | "cluster" | "hypothesis";

export interface NodeRow {
  id: string;
  kind: NodeKind;
  belief: BeliefLabel;
  observed?: boolean;
  value?: string | null;
  domain?: string[];
  dangerous?: boolean;
  triggered?: boolean;
  critical?: boolean;
  [param: string]: unknown;
}

export interface ActionRow {
  id: string;
  kind: "question" | "test" | "treatment";
  cost: CostVector;
  yields: string[];
  preconditions: string[];
  repeatable: boolean;
  performed?: boolean;
}

/** [node, old level, new level] rows from one propagation. */
export type Diff = [string, BeliefLabel, BeliefLabel][];

export type SessionStatus = "recommending" | "awaiting-input" | "terminated";

export interface StateDoc {
  id: string;
  kb: string;
  status: SessionStatus;
  observations: Record<string, string>;
  beliefs: Record<string, BeliefLabel>;
  nodes: NodeRow[];
  actions: ActionRow[];
  "last-diff": Diff;
  disposition: string | null;
  resolved: string[];
}

export interface FocusDoc {
  node: string;
  tier: "critical" | "triggered-dangerous" | "triggered";
  rationale: string;
}

export interface RecommendationDoc {
  kind: "recommendation";
  focus: FocusDoc;
  action: ActionRow;
  score: number;
  candidates: [string, number][];
  rationale: string;
}

export interface DispositionDoc {
  kind: "disposition";
  disposition: "confirmed-set" | "disconfirmed-set" | "no-useful-action";
  resolved: string[];
  rationale: string;
}

export type NextStep = RecommendationDoc | DispositionDoc;

export interface FindingRecordedDoc {
  finding: string;
  value: string;
  diff: Diff;
  beliefs: Record<string, BeliefLabel>;
  status: SessionStatus;
}

export interface ChangePlan {
  assignments: Record<string, string>;
  "resulting-belief": BeliefLabel;
  "rank-change": number;
  actions: string[];
  cost: CostVector;
}

export type QueryRequest =
  | { class: "state"; subject: string; parameter: string }
  | {
      class: "change";
      target: string;
      direction: "increase" | "decrease";
      ceiling?: CostVector;
      bound?: number;
    }
  | {
      class: "focus";
      kind?: NodeKind;
      expression?: string;
      supports?: string;
      detracts?: string;
    }
  | { class: "effect"; finding: string; mode: "syntactic" | "semantic"; bound?: number }
  | {
      class: "discriminate";
      first: string;
      second: string;
      mode?: "auto" | "heuristic" | "semantic";
      bound?: number;
    };

export type QueryResult =
  | { class: "state"; subject: string; parameter: string; value: unknown }
  | {
      class: "change";
      target: string;
      direction: "increase" | "decrease";
      plans: ChangePlan[];
    }
  | { class: "focus"; nodes: string[] }
  | { class: "effect"; finding: string; mode: "syntactic" | "semantic"; nodes: string[] }
  | {
      class: "discriminate";
      first: string;
      second: string;
      mode: "heuristic" | "semantic";
      discriminators: string[];
    };

export interface TraceEntryDoc {
  cycle: number;
  focus: FocusDoc | null;
  candidates: [string, number][];
  action: string;
  observed: Record<string, string>;
  diff: Diff;
}

export interface SessionEventDoc {
  sequence: number;
  timestamp: string;
  kind: "created" | "recommended" | "finding-recorded" | "query-run" | "terminated";
  payload: Record<string, unknown>;
}

export interface TraceDoc {
  id: string;
  kb: string;
  status: SessionStatus;
  presenting: Record<string, string>;
  entries: TraceEntryDoc[];
  events: SessionEventDoc[];
  beliefs: Record<string, BeliefLabel>;
  disposition: string | null;
  resolved: string[];
  /** Present only on batch-runner trace documents. */
  "cycle-limit-hit"?: boolean;
}

export interface ErrorDoc {
  code: string;
  message: string;
  location?: string;
}

/** A non-2xx response, carrying the protocol's error document. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly location?: string;

  constructor(doc: ErrorDoc, status: number) {
    super(doc.message);
    this.name = "ApiError";
    this.code = doc.code;
    this.status = status;
    this.location = doc.location;
  }

  toDoc(): ErrorDoc {
    const doc: ErrorDoc = { code: this.code, message: this.message };
    if (this.location !== undefined) doc.location = this.location;
    return doc;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class MuClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { accept: "application/json" } };
    if (body !== undefined) {
      init.headers = { ...init.headers, "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    let doc: unknown = null;
    if (text !== "") {
      try {
        doc = JSON.parse(text);
      } catch {
        doc = null;
      }
    }
    if (!response.ok) {
      const error =
        doc !== null && typeof doc === "object" && "code" in (doc as ErrorDoc)
          ? (doc as ErrorDoc)
          : { code: "internal-error", message: `HTTP ${response.status}` };
      throw new ApiError(error, response.status);
    }
    return doc as T;
  }

  async listKbs(): Promise<string[]> {
    const doc = await this.request<{ kbs: string[] }>("GET", "/v1/kbs");
    return doc.kbs;
  }

  createSession(kb: string): Promise<StateDoc> {
    return this.request<StateDoc>("POST", "/v1/sessions", { kb });
  }

  state(sessionId: string): Promise<StateDoc> {
    return this.request<StateDoc>("GET", `/v1/sessions/${sessionId}/state`);
  }

  recommendation(sessionId: string): Promise<NextStep> {
    return this.request<NextStep>("GET", `/v1/sessions/${sessionId}/recommendation`);
  }

  recordFinding(
    sessionId: string,
    finding: string,
    value: string | number | boolean,
  ): Promise<FindingRecordedDoc> {
    return this.request<FindingRecordedDoc>("POST", `/v1/sessions/${sessionId}/findings`, {
      finding,
      value,
    });
  }

  query(sessionId: string, request: QueryRequest): Promise<QueryResult> {
    return this.request<QueryResult>("POST", `/v1/sessions/${sessionId}/query`, request);
  }

  trace(sessionId: string): Promise<TraceDoc> {
    return this.request<TraceDoc>("GET", `/v1/sessions/${sessionId}/trace`);
  }
}
