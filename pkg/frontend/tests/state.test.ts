import { describe, expect, it } from "vitest";

import type { Finding, PreviewResponse, RuleMatch } from "../src/api.js";
import {
  addedLines,
  combinedDiff,
  combinedPreviewDiff,
  criticalCount,
  deltaSummary,
  describeMatch,
  findingsBadge,
  groupByZone,
  initialState,
  overallVerdict,
  removedLines,
  severityCounts,
  totalImprovement,
  withApplied,
  withFindings,
  withLog,
  withPreviews,
  withSession,
} from "../src/state.js";

function finding(partial: Partial<Finding>): Finding {
  return {
    smell: "cyclic-dependency",
    zone: "example.com.",
    severity: "critical",
    locations: [],
    evidence: {},
    impacts: [],
    suggestedRefactorings: [],
    ...partial,
  };
}

const CASE1_FINDINGS: Finding[] = [
  finding({}),
  finding({}),
  finding({ smell: "false-redundancy", severity: "warning" }),
  finding({
    smell: "false-redundancy",
    zone: "example.net.",
    severity: "warning",
  }),
];

function match(partial: Partial<RuleMatch>): RuleMatch {
  return {
    rule: "add-glue-record",
    zone: "example.com.",
    server: "dns1.example.net.",
    site: "com.",
    details: {},
    ...partial,
  };
}

function preview(partial: Partial<PreviewResponse>): PreviewResponse {
  return {
    rule: "add-glue-record",
    match: match({}),
    matchCount: 2,
    findingsDelta: { removed: [finding({})], introduced: [] },
    preservation: {
      verdict: "Preserved",
      mismatches: [],
      improvement: 2,
      scenarios: [],
    },
    diffs: { "com.": "+dns1.example.net. A 1.1.1.3" },
    historyLength: 0,
    ...partial,
  };
}

describe("findings badge", () => {
  it("leads with the critical count", () => {
    expect(findingsBadge(CASE1_FINDINGS)).toBe("2 critical, 2 warning");
  });

  it("reports zero criticals explicitly", () => {
    expect(findingsBadge([])).toBe("0 critical");
    expect(
      findingsBadge([finding({ severity: "warning", smell: "false-redundancy" })]),
    ).toBe("0 critical, 1 warning");
  });

  it("appends info counts only when present", () => {
    expect(findingsBadge([finding({ severity: "info" })])).toBe(
      "0 critical, 1 info",
    );
  });

  it("counts severities", () => {
    const counts = severityCounts(CASE1_FINDINGS);
    expect(counts.get("critical")).toBe(2);
    expect(counts.get("warning")).toBe(2);
    expect(counts.get("info")).toBe(0);
    expect(criticalCount(CASE1_FINDINGS)).toBe(2);
  });
});

describe("diff helpers", () => {
  const diff = [
    "--- a/com.zone",
    "+++ b/com.zone",
    "@@ -5,3 +5,5 @@",
    " ns1.example.com.    A 1.1.1.1",
    "+dns1.example.net.   A    1.1.1.3",
    "+dns2.example.net.   A    1.1.1.4",
    "-old.example.com.    A 9.9.9.9",
  ].join("\n");

  it("extracts normalized added payload lines", () => {
    expect(addedLines(diff)).toEqual([
      "dns1.example.net. A 1.1.1.3",
      "dns2.example.net. A 1.1.1.4",
    ]);
  });

  it("extracts removed payload lines and skips headers", () => {
    expect(removedLines(diff)).toEqual(["old.example.com. A 9.9.9.9"]);
  });

  it("combines per-origin diffs in origin order", () => {
    expect(combinedDiff({ "net.": "B", "com.": "A" })).toBe("A\nB");
    expect(combinedDiff({ "net.": "", "com.": "A" })).toBe("A");
  });

  it("joins every previewed match's diff", () => {
    const previews = [
      preview({}),
      preview({
        diffs: { "com.": "+dns2.example.net. A 1.1.1.4" },
      }),
    ];
    expect(addedLines(combinedPreviewDiff(previews))).toEqual([
      "dns1.example.net. A 1.1.1.3",
      "dns2.example.net. A 1.1.1.4",
    ]);
  });
});

describe("preview summaries", () => {
  it("reports Preserved only when every match preserves", () => {
    expect(overallVerdict([])).toBeNull();
    expect(overallVerdict([preview({})])).toBe("Preserved");
    const violated = preview({});
    violated.preservation = { ...violated.preservation, verdict: "Violated" };
    expect(overallVerdict([preview({}), violated])).toBe("Violated");
  });

  it("sums improvement and findings deltas", () => {
    const previews = [preview({}), preview({})];
    expect(totalImprovement(previews)).toBe(4);
    expect(deltaSummary(previews)).toEqual({ resolved: 2, introduced: 0 });
  });

  it("describes a match with server and site", () => {
    expect(describeMatch(match({}))).toBe(
      "add-glue-record: dns1.example.net. in com. (zone example.com.)",
    );
    expect(describeMatch(match({ server: null, site: null }))).toBe(
      "add-glue-record: example.com. (zone example.com.)",
    );
  });

  it("groups findings by zone", () => {
    const groups = groupByZone(CASE1_FINDINGS);
    expect([...groups.keys()]).toEqual(["example.com.", "example.net."]);
    expect(groups.get("example.com.")).toHaveLength(3);
  });
});

describe("state transitions", () => {
  it("starts a session fresh but keeps the log", () => {
    const before = withLog(initialState(), "hello");
    const after = withSession(before, "s1", 0);
    expect(after.sessionId).toBe("s1");
    expect(after.findings).toEqual([]);
    expect(after.log).toEqual(["hello", "session s1"]);
    expect(before.sessionId).toBeNull();
  });

  it("records previews and adopts the reported history length", () => {
    const base = withSession(initialState(), "s1", 0);
    const previews = [preview({ historyLength: 3 }), preview({ historyLength: 3 })];
    const after = withPreviews(base, previews);
    expect(after.previews).toHaveLength(2);
    expect(after.historyLength).toBe(3);
    expect(after.log.at(-1)).toBe(
      "preview add-glue-record: 2 match(es), Preserved",
    );
    expect(base.previews).toHaveLength(0);
  });

  it("clears previews and advances history on apply", () => {
    const base = withPreviews(
      withSession(initialState(), "s1", 0),
      [preview({})],
    );
    const after = withApplied(base, [
      preview({ historyLength: 1 }),
      preview({
        historyLength: 2,
        match: match({ server: "dns2.example.net." }),
      }),
    ]);
    expect(after.previews).toEqual([]);
    expect(after.historyLength).toBe(2);
    expect(after.log.at(-2)).toContain("applied add-glue-record: dns1");
    expect(after.log.at(-1)).toContain("dns2.example.net.");
  });

  it("replaces findings without touching the rest", () => {
    const base = withSession(initialState(), "s1", 0);
    const after = withFindings(base, CASE1_FINDINGS);
    expect(after.findings).toHaveLength(4);
    expect(after.sessionId).toBe("s1");
    expect(base.findings).toHaveLength(0);
  });
});
