// @vitest-environment jsdom
//
// End-to-end check against a live dns-advisor service seeded with the
// two-zone missing-glue corpus: the panel's preview must show exactly the
// two glue additions, and applying them must drop the badge to 0 critical.
import { spawn, type ChildProcess } from "node:child_process";
import { dirname, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AdvisorClient } from "../src/api.js";
import { addedLines, removedLines } from "../src/state.js";
import { WhatIfPanel } from "../src/whatIfPanel.js";

const PORT = 20000 + Math.floor(Math.random() * 20000);
const BASE = `http://127.0.0.1:${PORT}`;
const HERE = dirname(fileURLToPath(import.meta.url));

function fixture(name: string): string {
  return resolve(HERE, "../../tests/fixtures/case1", name);
}

let service: ChildProcess | null = null;
let serviceLog = "";

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 45_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    if (service && service.exitCode !== null) {
      throw new Error(
        `service exited with ${service.exitCode}: ${serviceLog}`,
      );
    }
    try {
      const response = await fetch(`${BASE}/healthz`);
      if (response.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`service never came up on ${BASE}: ${String(lastError)}`);
}

beforeAll(async () => {
  service = spawn(
    "dns-advisor",
    [
      "serve",
      "--zones",
      fixture("com.zone"),
      fixture("net.zone"),
      "--metadata",
      fixture("metadata.json"),
      "--host",
      "127.0.0.1",
      "--port",
      String(PORT),
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  service.stdout?.on("data", (chunk: Buffer) => {
    serviceLog += chunk.toString();
  });
  service.stderr?.on("data", (chunk: Buffer) => {
    serviceLog += chunk.toString();
  });
  await waitForService();
}, 60_000);

afterAll(() => {
  service?.kill("SIGTERM");
});

describe("round trip against a live service", () => {
  it("walks preview, apply, and a failure drill through the real panel", async () => {
    document.body.innerHTML = '<div id="panel"></div>';
    const host = document.querySelector<HTMLElement>("#panel")!;
    const client = new AdvisorClient(BASE);
    const panel = new WhatIfPanel(host, client);
    await panel.start();

    const badge = () =>
      host.querySelector("[data-role=badge]")?.textContent ?? "";
    expect(badge()).toBe("2 critical, 2 warning");
    const criticals = host.querySelectorAll(
      "[data-role=findings] .severity-critical",
    );
    expect(criticals).toHaveLength(2);

    host.querySelector<HTMLButtonElement>("[data-role=run-preview]")!.click();
    await panel.whenIdle();

    const diff = host.querySelector("[data-role=diff]")?.textContent ?? "";
    expect(addedLines(diff)).toEqual([
      "dns1.example.net. A 1.1.1.3",
      "dns2.example.net. A 1.1.1.4",
    ]);
    expect(removedLines(diff)).toEqual([]);
    expect(host.querySelector("[data-role=preview]")?.textContent).toContain(
      "Preserved",
    );

    host.querySelector<HTMLButtonElement>("[data-role=apply]")!.click();
    await panel.whenIdle();

    expect(badge()).toBe("0 critical, 2 warning");
    expect(
      host.querySelectorAll("[data-role=findings] .severity-critical"),
    ).toHaveLength(0);

    const input = host.querySelector<HTMLInputElement>(
      "[data-role=failed-servers]",
    )!;
    input.value = "ns1.example.com. ns2.example.com.";
    host.querySelector<HTMLButtonElement>("[data-role=run-simulate]")!.click();
    await panel.whenIdle();

    const rows = new Map(
      [...host.querySelectorAll<HTMLTableRowElement>(
        "[data-role=simulate-results] tr",
      )].map((row) => [
        row.dataset.name,
        {
          status: row.querySelector(".sim-status")?.textContent,
          addresses: row.querySelector(".sim-addresses")?.textContent,
        },
      ]),
    );
    expect(rows.get("ns1.example.com.")).toEqual({
      status: "Resolved",
      addresses: "1.1.1.1",
    });
    expect(rows.get("dns1.example.net.")).toEqual({
      status: "Resolved",
      addresses: "1.1.1.3",
    });
    expect(rows.get("dns2.example.net.")).toEqual({
      status: "Resolved",
      addresses: "1.1.1.4",
    });

    if (panel.sessionId) await client.deleteSession(panel.sessionId);
  }, 60_000);

  it("keeps sessions isolated: a fresh session still reports the criticals", async () => {
    const client = new AdvisorClient(BASE);
    const session = await client.createSession();
    const body = await client.findings(session.id);
    expect(
      body.findings.filter((finding) => finding.severity === "critical"),
    ).toHaveLength(2);
    await client.deleteSession(session.id);
  }, 60_000);
});
