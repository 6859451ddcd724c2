/** SVG rendering of the multi-plane dependency graph. */

import type { EdgeKind, GraphDocument } from "./api.js";
import { BAND_ORDER, layoutGraph } from "./layout.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const BAND_LABELS: Record<string, string> = {
  zone: "zones",
  server: "servers",
  organization: "organizations",
  location: "locations",
  network: "networks",
};

const EDGE_KINDS: EdgeKind[] = [
  "parent-dep",
  "ns-dep",
  "cname-dep",
  "hosts",
  "manages",
  "located-in",
  "announced-by",
];

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attributes: Record<string, string>,
): SVGElementTagNameMap[K] {
  const element = document.createElementNS(SVG_NS, tag);
  for (const [name, value] of Object.entries(attributes)) {
    element.setAttribute(name, value);
  }
  return element;
}

/** Replace `svg`'s content with the rendered graph. */
export function renderGraph(
  svg: SVGSVGElement,
  graph: GraphDocument,
  width = 960,
  height = 560,
): void {
  svg.replaceChildren();
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  const positions = layoutGraph(graph, width, height);

  const defs = svgElement("defs", {});
  const marker = svgElement("marker", {
    id: "arrow",
    viewBox: "0 0 10 10",
    refX: "14",
    refY: "5",
    markerWidth: "6",
    markerHeight: "6",
    orient: "auto-start-reverse",
  });
  marker.append(svgElement("path", { d: "M 0 0 L 10 5 L 0 10 z" }));
  defs.append(marker);
  svg.append(defs);

  const bandHeight = height / BAND_ORDER.length;
  BAND_ORDER.forEach((kind, band) => {
    const lane = svgElement("rect", {
      x: "0",
      y: String(band * bandHeight),
      width: String(width),
      height: String(bandHeight),
      class: `band band-${kind}`,
    });
    svg.append(lane);
    const label = svgElement("text", {
      x: "8",
      y: String(band * bandHeight + 16),
      class: "band-label",
    });
    label.textContent = BAND_LABELS[kind] ?? kind;
    svg.append(label);
  });

  for (const edge of graph.edges) {
    const source = positions.get(edge.source);
    const target = positions.get(edge.target);
    if (!source || !target) continue;
    const line = svgElement("line", {
      x1: String(source.x),
      y1: String(source.y),
      x2: String(target.x),
      y2: String(target.y),
      class: `edge edge-${edge.kind}`,
      "marker-end": "url(#arrow)",
    });
    line.append(titleElement(`${edge.source} -${edge.kind}-> ${edge.target}`));
    svg.append(line);
  }

  for (const node of graph.nodes) {
    const position = positions.get(node.id);
    if (!position) continue;
    const group = svgElement("g", {
      class: `node node-${node.kind}`,
      "data-node-id": node.id,
      transform: `translate(${position.x}, ${position.y})`,
    });
    const circle = svgElement("circle", { r: "9" });
    circle.append(titleElement(node.id));
    group.append(circle);
    const label = svgElement("text", { y: "-13", class: "node-label" });
    label.textContent = node.key;
    group.append(label);
    svg.append(group);
  }
}

function titleElement(text: string): SVGTitleElement {
  const title = document.createElementNS(SVG_NS, "title");
  title.textContent = text;
  return title;
}

/** Legend entries as plain DOM, one per edge kind present in the graph. */
export function renderLegend(
  container: HTMLElement,
  graph: GraphDocument,
): void {
  container.replaceChildren();
  const present = new Set(graph.edges.map((edge) => edge.kind));
  for (const kind of EDGE_KINDS) {
    if (!present.has(kind)) continue;
    const item = document.createElement("span");
    item.className = `legend-item legend-${kind}`;
    item.textContent = kind;
    container.append(item);
  }
}
