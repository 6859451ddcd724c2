// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import {
  ApiError,
  type Finding,
  type FindingsDocument,
  type PreviewResponse,
  type RefactorRequest,
  type SessionInfo,
  type SimulationOutcome,
  type SimulationRequest,
} from "../src/api.js";
import { addedLines } from "../src/state.js";
import { WhatIfPanel, type PanelClient } from "../src/whatIfPanel.js";

const CRITICALS: Finding[] = [
  {
    smell: "cyclic-dependency",
    zone: "example.com.",
    severity: "critical",
    locations: ["com."],
    evidence: { missingGlue: ["dns1.example.net."] },
    impacts: ["resolution can dead-end when glue is absent"],
    suggestedRefactorings: ["add-glue-record"],
  },
  {
    smell: "cyclic-dependency",
    zone: "example.com.",
    severity: "critical",
    locations: ["com."],
    evidence: { missingGlue: ["dns2.example.net."] },
    impacts: ["resolution can dead-end when glue is absent"],
    suggestedRefactorings: ["add-glue-record"],
  },
];

const WARNINGS: Finding[] = [
  {
    smell: "false-redundancy",
    zone: "example.com.",
    severity: "warning",
    locations: ["DC1"],
    evidence: { dimension: "geographic" },
    impacts: ["one site failure can take out every server"],
    suggestedRefactorings: ["move-server-location"],
  },
  {
    smell: "false-redundancy",
    zone: "example.net.",
    severity: "warning",
    locations: ["DC1"],
    evidence: { dimension: "geographic" },
    impacts: ["one site failure can take out every server"],
    suggestedRefactorings: ["move-server-location"],
  },
];

const GLUE = new Map([
  ["dns1.example.net.", "1.1.1.3"],
  ["dns2.example.net.", "1.1.1.4"],
]);

function glueResponse(
  server: string,
  matchCount: number,
  historyLength: number,
): PreviewResponse {
  return {
    rule: "add-glue-record",
    match: {
      rule: "add-glue-record",
      zone: "example.com.",
      server,
      site: "com.",
      details: { addresses: [GLUE.get(server)] },
    },
    matchCount,
    findingsDelta: {
      removed: [CRITICALS[server === "dns1.example.net." ? 0 : 1]],
      introduced: [],
    },
    preservation: {
      verdict: "Preserved",
      mismatches: [],
      improvement: 2,
      scenarios: [],
    },
    diffs: {
      "com.": [
        "--- a/com.zone",
        "+++ b/com.zone",
        "@@ -10,0 +11,1 @@",
        `+${server}   A ${GLUE.get(server)}`,
      ].join("\n"),
      "net.": "",
    },
    historyLength,
  };
}

/** Canned service shaped like the missing-glue fixture corpus: two glue matches, two warnings left. */
class StubClient implements PanelClient {
  applied = 0;
  findingsCalls = 0;
  previewCalls: RefactorRequest[] = [];
  applyCalls: RefactorRequest[] = [];
  simulateCalls: SimulationRequest[] = [];
  failApplyWith: ApiError | null = null;

  async createSession(): Promise<SessionInfo> {
    return { id: "stub-session", historyLength: 0 };
  }

  async findings(): Promise<FindingsDocument> {
    this.findingsCalls += 1;
    return {
      findings:
        this.applied >= 2 ? [...WARNINGS] : [...CRITICALS, ...WARNINGS],
    };
  }

  async previewRefactoring(
    _sessionId: string,
    request: RefactorRequest,
  ): Promise<PreviewResponse> {
    this.previewCalls.push(request);
    if (request.rule !== "add-glue-record") {
      throw new ApiError(400, `unknown refactoring rule ${request.rule}`);
    }
    const server =
      (request.matchIndex ?? 0) === 0 ? "dns1.example.net." : "dns2.example.net.";
    return glueResponse(server, 2 - this.applied, this.applied);
  }

  async applyRefactoring(
    _sessionId: string,
    request: RefactorRequest,
  ): Promise<PreviewResponse> {
    this.applyCalls.push(request);
    if (this.failApplyWith) throw this.failApplyWith;
    if (request.historyLength !== this.applied) {
      throw new ApiError(
        409,
        `session advanced to ${this.applied} entries since the preview`,
      );
    }
    const server =
      this.applied === 0 ? "dns1.example.net." : "dns2.example.net.";
    this.applied += 1;
    return glueResponse(server, 1, this.applied);
  }

  async simulateFailures(
    _sessionId: string,
    request: SimulationRequest,
  ): Promise<{ results: SimulationOutcome[] }> {
    this.simulateCalls.push(request);
    const results: SimulationOutcome[] = [
      {
        name: "ns1.example.com.",
        qtype: "A",
        status: this.applied >= 2 ? "Resolved" : "Unresolvable",
        addresses: this.applied >= 2 ? ["1.1.1.1"] : [],
        serversTouched: [],
        zonesTouched: [".", "com."],
      },
    ];
    return { results };
  }
}

function text(host: HTMLElement, role: string): string {
  const element = host.querySelector(`[data-role=${role}]`);
  return element?.textContent ?? "";
}

describe("what-if panel DOM", () => {
  let host: HTMLElement;
  let client: StubClient;
  let panel: WhatIfPanel;

  beforeEach(async () => {
    document.body.innerHTML = '<div id="panel"></div>';
    host = document.querySelector<HTMLElement>("#panel")!;
    client = new StubClient();
    panel = new WhatIfPanel(host, client);
    await panel.start();
  });

  it("shows the findings badge and list after start", () => {
    expect(text(host, "badge")).toBe("2 critical, 2 warning");
    const items = host.querySelectorAll("[data-role=findings] li");
    expect(items).toHaveLength(4);
    expect(items[0].className).toContain("severity-critical");
    expect(items[0].textContent).toContain("cyclic-dependency");
    const apply = host.querySelector<HTMLButtonElement>("[data-role=apply]")!;
    expect(apply.disabled).toBe(true);
  });

  it("previews every match of the selected rule", async () => {
    host.querySelector<HTMLButtonElement>("[data-role=run-preview]")!.click();
    await panel.whenIdle();

    expect(client.previewCalls.map((call) => call.matchIndex)).toEqual([0, 1]);
    expect(addedLines(text(host, "diff"))).toEqual([
      "dns1.example.net. A 1.1.1.3",
      "dns2.example.net. A 1.1.1.4",
    ]);
    const summary = text(host, "preview");
    expect(summary).toContain("Preserved");
    expect(summary).toContain("resolves 2 finding(s), introduces 0");
    expect(
      host.querySelector<HTMLButtonElement>("[data-role=apply]")!.disabled,
    ).toBe(false);
  });

  it("applies the previewed rule across matches and refreshes the badge", async () => {
    host.querySelector<HTMLButtonElement>("[data-role=run-preview]")!.click();
    await panel.whenIdle();
    host.querySelector<HTMLButtonElement>("[data-role=apply]")!.click();
    await panel.whenIdle();

    expect(client.applyCalls.map((call) => call.historyLength)).toEqual([0, 1]);
    expect(text(host, "badge")).toBe("0 critical, 2 warning");
    expect(host.querySelectorAll("[data-role=findings] li")).toHaveLength(2);
    expect(
      host.querySelector<HTMLButtonElement>("[data-role=apply]")!.disabled,
    ).toBe(true);
    expect(text(host, "log")).toContain("applied add-glue-record: dns1.example.net.");
    expect(text(host, "log")).toContain("dns2.example.net.");
  });

  it("notifies onApplied once per successful batch", async () => {
    let notified = 0;
    panel.onApplied = () => {
      notified += 1;
    };
    host.querySelector<HTMLButtonElement>("[data-role=run-preview]")!.click();
    await panel.whenIdle();
    host.querySelector<HTMLButtonElement>("[data-role=apply]")!.click();
    await panel.whenIdle();
    expect(notified).toBe(1);
  });

  it("surfaces a conflict, drops the preview, and re-reads findings", async () => {
    host.querySelector<HTMLButtonElement>("[data-role=run-preview]")!.click();
    await panel.whenIdle();
    client.failApplyWith = new ApiError(
      409,
      "session advanced by 1 entries since the preview at 0",
    );
    const findingsCallsBefore = client.findingsCalls;

    host.querySelector<HTMLButtonElement>("[data-role=apply]")!.click();
    await panel.whenIdle();

    expect(text(host, "log")).toContain("HTTP 409");
    expect(
      host.querySelector<HTMLButtonElement>("[data-role=apply]")!.disabled,
    ).toBe(true);
    expect(client.findingsCalls).toBe(findingsCallsBefore + 1);
    expect(text(host, "badge")).toBe("2 critical, 2 warning");
  });

  it("logs a preview error without clobbering the findings", async () => {
    const select = host.querySelector<HTMLSelectElement>("[data-role=rule]")!;
    select.value = "move-server-location";
    host.querySelector<HTMLButtonElement>("[data-role=run-preview]")!.click();
    await panel.whenIdle();

    expect(text(host, "log")).toContain("HTTP 400");
    expect(text(host, "diff")).toBe("");
    expect(text(host, "badge")).toBe("2 critical, 2 warning");
  });

  it("runs a failure simulation from the form input", async () => {
    const input = host.querySelector<HTMLInputElement>(
      "[data-role=failed-servers]",
    )!;
    input.value = "ns1.example.com., ns2.example.com.";
    host.querySelector<HTMLButtonElement>("[data-role=run-simulate]")!.click();
    await panel.whenIdle();

    expect(client.simulateCalls).toEqual([
      { failedServers: ["ns1.example.com.", "ns2.example.com."] },
    ]);
    const rows = host.querySelectorAll("[data-role=simulate-results] tr");
    expect(rows).toHaveLength(1);
    expect(rows[0].textContent).toContain("Unresolvable");
  });
});
