/** Browser entry point: wire the graph view and the what-if panel. */

import { AdvisorClient } from "./api.js";
import { renderGraph, renderLegend } from "./graphView.js";
import { WhatIfPanel } from "./whatIfPanel.js";

interface AppConfig {
  serviceUrl: string;
}

async function loadConfig(): Promise<AppConfig> {
  const response = await fetch("./config.json");
  if (!response.ok) {
    throw new Error(`cannot load config.json (HTTP ${response.status})`);
  }
  const doc = (await response.json()) as Partial<AppConfig>;
  if (typeof doc.serviceUrl !== "string" || doc.serviceUrl.length === 0) {
    throw new Error("config.json must name a serviceUrl");
  }
  return { serviceUrl: doc.serviceUrl };
}

function requireElement<T extends Element>(selector: string): T {
  const element = document.querySelector<T>(selector);
  if (!element) throw new Error(`missing page element ${selector}`);
  return element;
}

async function refreshGraph(
  client: AdvisorClient,
  sessionId: string,
  svg: SVGSVGElement,
  legend: HTMLElement,
): Promise<void> {
  const graph = await client.graph(sessionId);
  renderGraph(svg, graph);
  renderLegend(legend, graph);
}

async function boot(): Promise<void> {
  const config = await loadConfig();
  const client = new AdvisorClient(config.serviceUrl);
  const svg = requireElement<SVGSVGElement>("#graph");
  const legend = requireElement<HTMLElement>("#legend");
  const host = requireElement<HTMLElement>("#panel");

  const panel = new WhatIfPanel(host, client);
  await panel.start();
  const sessionId = panel.sessionId;
  if (!sessionId) throw new Error("no session established");

  await refreshGraph(client, sessionId, svg, legend);
  panel.onApplied = () => {
    void refreshGraph(client, sessionId, svg, legend);
  };
}

boot().catch((error) => {
  const banner = document.createElement("div");
  banner.className = "boot-error";
  banner.textContent =
    error instanceof Error ? error.message : String(error);
  document.body.prepend(banner);
});
