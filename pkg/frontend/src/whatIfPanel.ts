/** Interactive what-if panel: findings, rule preview/apply, failure drills. */

import type {
  AdvisorClient,
  Finding,
  PreviewResponse,
  SimulationOutcome,
} from "./api.js";
import type { PanelState } from "./state.js";
import {
  combinedPreviewDiff,
  deltaSummary,
  describeMatch,
  findingsBadge,
  initialState,
  overallVerdict,
  totalImprovement,
  withApplied,
  withFindings,
  withLog,
  withPreviews,
  withSession,
  withSimulation,
} from "./state.js";

/** The slice of the client the panel depends on; tests substitute stubs. */
export type PanelClient = Pick<
  AdvisorClient,
  | "createSession"
  | "findings"
  | "previewRefactoring"
  | "applyRefactoring"
  | "simulateFailures"
>;

export const RULE_IDS = [
  "add-glue-record",
  "move-server-location",
  "add-server-in-location",
] as const;

function errorMessage(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}

interface PanelElements {
  badge: HTMLSpanElement;
  findings: HTMLUListElement;
  rule: HTMLSelectElement;
  runPreview: HTMLButtonElement;
  preview: HTMLElement;
  diff: HTMLPreElement;
  apply: HTMLButtonElement;
  failedServers: HTMLInputElement;
  runSimulate: HTMLButtonElement;
  simulateResults: HTMLTableSectionElement;
  log: HTMLUListElement;
}

export class WhatIfPanel {
  private current: PanelState = initialState();
  private readonly elements: PanelElements;
  private pending: Promise<void> = Promise.resolve();

  /** Invoked after a successful apply, once findings are refreshed. */
  onApplied: (() => void) | null = null;

  constructor(
    container: HTMLElement,
    private readonly client: PanelClient,
    rules: readonly string[] = RULE_IDS,
  ) {
    this.elements = buildSkeleton(container, rules);
    this.elements.runPreview.addEventListener("click", (event) => {
      event.preventDefault();
      this.enqueue(() => this.previewSelected());
    });
    this.elements.apply.addEventListener("click", (event) => {
      event.preventDefault();
      this.enqueue(() => this.applyPreviewed());
    });
    this.elements.runSimulate.addEventListener("click", (event) => {
      event.preventDefault();
      this.enqueue(() => this.simulate());
    });
    this.render();
  }

  get state(): PanelState {
    return this.current;
  }

  get sessionId(): string | null {
    return this.current.sessionId;
  }

  /** Resolves once every queued interaction has settled. */
  whenIdle(): Promise<void> {
    return this.pending;
  }

  private enqueue(task: () => Promise<void>): void {
    this.pending = this.pending
      .then(task)
      .catch((error) => {
        this.current = withLog(this.current, errorMessage(error));
        this.render();
      });
  }

  async start(): Promise<void> {
    const session = await this.client.createSession();
    this.current = withSession(this.current, session.id, session.historyLength);
    await this.refreshFindings();
  }

  async refreshFindings(): Promise<void> {
    if (!this.current.sessionId) return;
    const body = await this.client.findings(this.current.sessionId);
    this.current = withFindings(this.current, body.findings);
    this.render();
  }

  /** Preview the selected rule across every match it currently has. */
  async previewSelected(): Promise<void> {
    const sessionId = this.current.sessionId;
    if (!sessionId) return;
    const rule = this.elements.rule.value;
    try {
      const first = await this.client.previewRefactoring(sessionId, {
        rule,
        matchIndex: 0,
      });
      const previews: PreviewResponse[] = [first];
      for (let index = 1; index < first.matchCount; index++) {
        previews.push(
          await this.client.previewRefactoring(sessionId, {
            rule,
            matchIndex: index,
          }),
        );
      }
      this.current = withPreviews(this.current, previews);
    } catch (error) {
      this.current = withLog(this.current, errorMessage(error));
    }
    this.render();
  }

  /**
   * Apply the previewed rule once per previewed match. Each application
   * carries the history length from the previous one, so a concurrent
   * change in the same session aborts the batch with a conflict.
   */
  async applyPreviewed(): Promise<void> {
    const sessionId = this.current.sessionId;
    const previews = this.current.previews;
    if (!sessionId || previews.length === 0) return;
    const rule = previews[0].rule;
    const responses: PreviewResponse[] = [];
    let historyLength = this.current.historyLength;
    try {
      for (let step = 0; step < previews.length; step++) {
        const body = await this.client.applyRefactoring(sessionId, {
          rule,
          matchIndex: 0,
          historyLength,
        });
        historyLength = body.historyLength;
        responses.push(body);
      }
      this.current = withApplied(this.current, responses);
    } catch (error) {
      this.current = withApplied(this.current, responses);
      this.current = withLog(this.current, errorMessage(error));
    }
    await this.refreshFindings();
    if (responses.length > 0) this.onApplied?.();
  }

  async simulate(): Promise<void> {
    const sessionId = this.current.sessionId;
    if (!sessionId) return;
    const failedServers = this.elements.failedServers.value
      .split(/[\s,]+/)
      .map((name) => name.trim())
      .filter((name) => name.length > 0);
    try {
      const body = await this.client.simulateFailures(sessionId, {
        failedServers,
      });
      this.current = withSimulation(this.current, body.results);
    } catch (error) {
      this.current = withLog(this.current, errorMessage(error));
    }
    this.render();
  }

  private render(): void {
    const state = this.current;
    this.elements.badge.textContent = findingsBadge(state.findings);
    this.elements.badge.classList.toggle(
      "badge-critical",
      state.findings.some((finding) => finding.severity === "critical"),
    );
    renderFindings(this.elements.findings, state.findings);
    renderPreview(this.elements.preview, state.previews);
    this.elements.diff.textContent = combinedPreviewDiff(state.previews);
    this.elements.apply.disabled = state.previews.length === 0;
    renderSimulation(this.elements.simulateResults, state.simulation);
    renderLog(this.elements.log, state.log);
  }
}

function buildSkeleton(
  container: HTMLElement,
  rules: readonly string[],
): PanelElements {
  container.classList.add("what-if-panel");
  container.replaceChildren();

  const header = document.createElement("header");
  header.className = "panel-header";
  const title = document.createElement("h2");
  title.textContent = "What-if analysis";
  const badge = document.createElement("span");
  badge.className = "badge";
  badge.dataset.role = "badge";
  header.append(title, badge);

  const findings = document.createElement("ul");
  findings.className = "findings";
  findings.dataset.role = "findings";

  const form = document.createElement("form");
  form.className = "refactor-form";
  const rule = document.createElement("select");
  rule.dataset.role = "rule";
  for (const id of rules) {
    const option = document.createElement("option");
    option.value = id;
    option.textContent = id;
    rule.append(option);
  }
  const runPreview = document.createElement("button");
  runPreview.type = "submit";
  runPreview.dataset.role = "run-preview";
  runPreview.textContent = "Preview";
  form.append(rule, runPreview);

  const preview = document.createElement("section");
  preview.className = "preview";
  preview.dataset.role = "preview";

  const diff = document.createElement("pre");
  diff.className = "diff";
  diff.dataset.role = "diff";

  const apply = document.createElement("button");
  apply.type = "button";
  apply.dataset.role = "apply";
  apply.textContent = "Apply";
  apply.disabled = true;

  const simulateForm = document.createElement("form");
  simulateForm.className = "simulate-form";
  const failedServers = document.createElement("input");
  failedServers.type = "text";
  failedServers.placeholder = "failed servers, e.g. ns1.example.com.";
  failedServers.dataset.role = "failed-servers";
  const runSimulate = document.createElement("button");
  runSimulate.type = "submit";
  runSimulate.dataset.role = "run-simulate";
  runSimulate.textContent = "Simulate failures";
  simulateForm.append(failedServers, runSimulate);

  const simulateTable = document.createElement("table");
  simulateTable.className = "simulation";
  const head = simulateTable.createTHead();
  const headRow = head.insertRow();
  for (const column of ["name", "status", "addresses"]) {
    const cell = document.createElement("th");
    cell.textContent = column;
    headRow.append(cell);
  }
  const simulateResults = simulateTable.createTBody();
  simulateResults.dataset.role = "simulate-results";

  const log = document.createElement("ul");
  log.className = "log";
  log.dataset.role = "log";

  container.append(
    header,
    findings,
    form,
    preview,
    diff,
    apply,
    simulateForm,
    simulateTable,
    log,
  );
  return {
    badge,
    findings,
    rule,
    runPreview,
    preview,
    diff,
    apply,
    failedServers,
    runSimulate,
    simulateResults,
    log,
  };
}

function renderFindings(list: HTMLUListElement, findings: Finding[]): void {
  list.replaceChildren();
  if (findings.length === 0) {
    const item = document.createElement("li");
    item.className = "finding finding-none";
    item.textContent = "no findings";
    list.append(item);
    return;
  }
  for (const finding of findings) {
    const item = document.createElement("li");
    item.className = `finding severity-${finding.severity}`;
    item.dataset.smell = finding.smell;
    item.dataset.zone = finding.zone;
    item.textContent =
      `${finding.smell}: ${finding.zone} [${finding.severity}]`;
    list.append(item);
  }
}

function renderPreview(
  section: HTMLElement,
  previews: PreviewResponse[],
): void {
  section.replaceChildren();
  if (previews.length === 0) {
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "no preview loaded";
    section.append(hint);
    return;
  }
  const matches = document.createElement("p");
  matches.className = "preview-matches";
  matches.textContent = previews
    .map((preview) => describeMatch(preview.match))
    .join("; ");
  const verdict = document.createElement("p");
  const overall = overallVerdict(previews);
  verdict.className = `preview-verdict verdict-${(overall ?? "").toLowerCase()}`;
  verdict.textContent =
    `resolution ${overall}, improvement ${totalImprovement(previews)}`;
  const delta = deltaSummary(previews);
  const impact = document.createElement("p");
  impact.className = "preview-delta";
  impact.textContent =
    `resolves ${delta.resolved} finding(s), introduces ${delta.introduced}`;
  section.append(matches, verdict, impact);
}

function renderSimulation(
  body: HTMLTableSectionElement,
  results: SimulationOutcome[],
): void {
  body.replaceChildren();
  for (const outcome of results) {
    const row = body.insertRow();
    row.dataset.name = outcome.name;
    row.className = `sim-${outcome.status.toLowerCase()}`;
    row.insertCell().textContent = outcome.name;
    const status = row.insertCell();
    status.className = "sim-status";
    status.textContent = outcome.status;
    const addresses = row.insertCell();
    addresses.className = "sim-addresses";
    addresses.textContent = outcome.addresses.join(", ");
  }
}

function renderLog(list: HTMLUListElement, entries: string[]): void {
  list.replaceChildren();
  for (const entry of entries) {
    const item = document.createElement("li");
    item.textContent = entry;
    list.append(item);
  }
}
