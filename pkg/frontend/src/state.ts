/** Pure view-state helpers for the what-if panel. */

import type {
  Finding,
  PreviewResponse,
  RuleMatch,
  Severity,
  SimulationOutcome,
} from "./api.js";

export interface PanelState {
  sessionId: string | null;
  historyLength: number;
  findings: Finding[];
  /** One entry per match of the previewed rule, in match order. */
  previews: PreviewResponse[];
  simulation: SimulationOutcome[];
  log: string[];
}

export function initialState(): PanelState {
  return {
    sessionId: null,
    historyLength: 0,
    findings: [],
    previews: [],
    simulation: [],
    log: [],
  };
}

const SEVERITY_ORDER: Severity[] = ["critical", "warning", "info"];

export function severityCounts(findings: Finding[]): Map<Severity, number> {
  const counts = new Map<Severity, number>();
  for (const severity of SEVERITY_ORDER) counts.set(severity, 0);
  for (const finding of findings) {
    counts.set(finding.severity, (counts.get(finding.severity) ?? 0) + 1);
  }
  return counts;
}

export function criticalCount(findings: Finding[]): number {
  return severityCounts(findings).get("critical") ?? 0;
}

/** Badge text always leads with the critical count, e.g. "2 critical, 2 warning". */
export function findingsBadge(findings: Finding[]): string {
  const counts = severityCounts(findings);
  const parts = [`${counts.get("critical") ?? 0} critical`];
  const warnings = counts.get("warning") ?? 0;
  if (warnings > 0) parts.push(`${warnings} warning`);
  const infos = counts.get("info") ?? 0;
  if (infos > 0) parts.push(`${infos} info`);
  return parts.join(", ");
}

/** Added payload lines of a unified diff, whitespace-normalized. */
export function addedLines(diff: string): string[] {
  const lines: string[] = [];
  for (const line of diff.split("\n")) {
    if (line.startsWith("+") && !line.startsWith("+++")) {
      lines.push(line.slice(1).trim().replace(/\s+/g, " "));
    }
  }
  return lines.filter((line) => line.length > 0);
}

export function removedLines(diff: string): string[] {
  const lines: string[] = [];
  for (const line of diff.split("\n")) {
    if (line.startsWith("-") && !line.startsWith("---")) {
      lines.push(line.slice(1).trim().replace(/\s+/g, " "));
    }
  }
  return lines.filter((line) => line.length > 0);
}

/** One combined diff over every changed origin, in origin order. */
export function combinedDiff(diffs: Record<string, string>): string {
  return Object.keys(diffs)
    .sort()
    .map((origin) => diffs[origin])
    .filter((diff) => diff.length > 0)
    .join("\n");
}

/** Every match's diff joined into a single text, match order preserved. */
export function combinedPreviewDiff(previews: PreviewResponse[]): string {
  return previews
    .map((preview) => combinedDiff(preview.diffs))
    .filter((diff) => diff.length > 0)
    .join("\n");
}

/** "Preserved" only when every previewed match preserves resolution. */
export function overallVerdict(
  previews: PreviewResponse[],
): "Preserved" | "Violated" | null {
  if (previews.length === 0) return null;
  return previews.every((p) => p.preservation.verdict === "Preserved")
    ? "Preserved"
    : "Violated";
}

export function totalImprovement(previews: PreviewResponse[]): number {
  return previews.reduce((sum, p) => sum + p.preservation.improvement, 0);
}

export function deltaSummary(previews: PreviewResponse[]): {
  resolved: number;
  introduced: number;
} {
  return {
    resolved: previews.reduce((n, p) => n + p.findingsDelta.removed.length, 0),
    introduced: previews.reduce(
      (n, p) => n + p.findingsDelta.introduced.length,
      0,
    ),
  };
}

export function describeMatch(match: RuleMatch): string {
  const target = match.server ?? match.zone;
  const site = match.site ? ` in ${match.site}` : "";
  return `${match.rule}: ${target}${site} (zone ${match.zone})`;
}

export function groupByZone(findings: Finding[]): Map<string, Finding[]> {
  const groups = new Map<string, Finding[]>();
  for (const finding of findings) {
    const bucket = groups.get(finding.zone);
    if (bucket) bucket.push(finding);
    else groups.set(finding.zone, [finding]);
  }
  return groups;
}

export function withSession(
  state: PanelState,
  sessionId: string,
  historyLength: number,
): PanelState {
  return {
    ...initialState(),
    sessionId,
    historyLength,
    log: [...state.log, `session ${sessionId}`],
  };
}

export function withFindings(state: PanelState, findings: Finding[]): PanelState {
  return { ...state, findings };
}

/**
 * Record a rule preview. The history length reported by the service becomes
 * the optimistic-lock baseline for a later apply.
 */
export function withPreviews(
  state: PanelState,
  previews: PreviewResponse[],
): PanelState {
  if (previews.length === 0) {
    return { ...state, previews: [] };
  }
  const first = previews[0];
  return {
    ...state,
    previews,
    historyLength: first.historyLength,
    log: [
      ...state.log,
      `preview ${first.rule}: ${previews.length} match(es), ` +
        `${overallVerdict(previews)}`,
    ],
  };
}

/** Record a batch of applied refactorings, in application order. */
export function withApplied(
  state: PanelState,
  responses: PreviewResponse[],
): PanelState {
  if (responses.length === 0) {
    return { ...state, previews: [] };
  }
  const last = responses[responses.length - 1];
  return {
    ...state,
    previews: [],
    historyLength: last.historyLength,
    log: [
      ...state.log,
      ...responses.map((body) => `applied ${describeMatch(body.match)}`),
    ],
  };
}

export function withSimulation(
  state: PanelState,
  results: SimulationOutcome[],
): PanelState {
  return { ...state, simulation: results };
}

export function withLog(state: PanelState, message: string): PanelState {
  return { ...state, log: [...state.log, message] };
}
