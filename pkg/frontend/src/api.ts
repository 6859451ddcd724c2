/** Typed client for the dns-advisor HTTP service. */

export type NodeKind =
  | "zone"
  | "server"
  | "organization"
  | "location"
  | "network";

export type EdgeKind =
  | "parent-dep"
  | "ns-dep"
  | "cname-dep"
  | "hosts"
  | "manages"
  | "located-in"
  | "announced-by";

export interface GraphNode {
  id: string;
  kind: NodeKind;
  key: string;
}

export interface GraphEdge {
  source: string;
  target: string;
  kind: EdgeKind;
}

export interface GraphDocument {
  nodes: GraphNode[];
  edges: GraphEdge[];
  root: string;
}

export type Severity = "critical" | "warning" | "info";

export interface Finding {
  smell: string;
  zone: string;
  severity: Severity;
  locations: string[];
  evidence: Record<string, unknown>;
  impacts: string[];
  suggestedRefactorings: string[];
}

export interface FindingsDocument {
  findings: Finding[];
}

export interface MetricEntry {
  name: string;
  value: number;
  breakdown: Record<string, unknown>;
  confidence: "full" | "partial";
}

export interface ZoneMetrics {
  zone: string;
  metrics: MetricEntry[];
}

export interface RuleMatch {
  rule: string;
  zone: string;
  server: string | null;
  site: string | null;
  details: Record<string, unknown>;
}

export interface AnswerMismatch {
  name: string;
  qtype: string;
  before: string[];
  after: string[] | string;
}

export interface PreservationScenario {
  scenario: string;
  failedServersBefore: string[];
  failedServersAfter: string[];
  resolvableBefore: string[];
  resolvableAfter: string[];
  improved: boolean;
}

export interface PreservationReport {
  verdict: "Preserved" | "Violated";
  mismatches: AnswerMismatch[];
  improvement: number;
  scenarios: PreservationScenario[];
}

export interface FindingsDelta {
  removed: Finding[];
  introduced: Finding[];
}

export interface PreviewResponse {
  rule: string;
  match: RuleMatch;
  matchCount: number;
  findingsDelta: FindingsDelta;
  preservation: PreservationReport;
  diffs: Record<string, string>;
  historyLength: number;
}

export interface RefactorRequest {
  rule: string;
  matchIndex?: number;
  params?: Record<string, unknown>;
  historyLength?: number;
}

export type ResolutionStatus =
  | "Resolved"
  | "Unresolvable"
  | "CycleDetected"
  | "LoopBudgetExceeded";

export interface SimulationOutcome {
  name: string;
  qtype: string;
  status: ResolutionStatus;
  addresses: string[];
  serversTouched: string[];
  zonesTouched: string[];
}

export interface SimulationRequest {
  failedServers?: string[];
  names?: string[];
}

export interface SessionInfo {
  id: string;
  historyLength: number;
}

export interface HealthInfo {
  status: string;
  service: string;
  version: string;
  sessions: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(response: Response): Promise<string> {
  const text = await response.text();
  try {
    const doc = JSON.parse(text) as { detail?: unknown };
    if (typeof doc.detail === "string") return doc.detail;
  } catch {
    /* not JSON, fall through to the raw body */
  }
  return text || response.statusText;
}

export class AdvisorClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  private async requestText(path: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "GET",
    });
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return response.text();
  }

  health(): Promise<HealthInfo> {
    return this.request("GET", "/healthz");
  }

  createSession(): Promise<SessionInfo> {
    return this.request("POST", "/sessions");
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }

  graph(sessionId: string): Promise<GraphDocument> {
    return this.request("GET", `/sessions/${sessionId}/graph`);
  }

  findings(sessionId: string): Promise<FindingsDocument> {
    return this.request("GET", `/sessions/${sessionId}/findings`);
  }

  zoneMetrics(sessionId: string, zone: string): Promise<ZoneMetrics> {
    return this.request(
      "GET",
      `/sessions/${sessionId}/metrics/${encodeURIComponent(zone)}`,
    );
  }

  previewRefactoring(
    sessionId: string,
    request: RefactorRequest,
  ): Promise<PreviewResponse> {
    return this.request(
      "POST",
      `/sessions/${sessionId}/refactor/preview`,
      request,
    );
  }

  applyRefactoring(
    sessionId: string,
    request: RefactorRequest,
  ): Promise<PreviewResponse> {
    return this.request(
      "POST",
      `/sessions/${sessionId}/refactor/apply`,
      request,
    );
  }

  simulateFailures(
    sessionId: string,
    request: SimulationRequest,
  ): Promise<{ results: SimulationOutcome[] }> {
    return this.request(
      "POST",
      `/sessions/${sessionId}/failures/simulate`,
      request,
    );
  }

  zoneFile(sessionId: string, origin: string): Promise<string> {
    return this.requestText(
      `/sessions/${sessionId}/zones/${encodeURIComponent(origin)}/file`,
    );
  }

  zoneDiff(sessionId: string, origin: string): Promise<string> {
    return this.requestText(
      `/sessions/${sessionId}/zones/${encodeURIComponent(origin)}/diff`,
    );
  }
}
