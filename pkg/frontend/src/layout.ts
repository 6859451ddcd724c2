/** Deterministic plane-banded layout for the dependency graph. */

import type { GraphDocument, NodeKind } from "./api.js";

export const BAND_ORDER: NodeKind[] = [
  "zone",
  "server",
  "organization",
  "location",
  "network",
];

export interface NodePosition {
  id: string;
  x: number;
  y: number;
  band: number;
}

/**
 * Place every node in a horizontal band by kind, spread evenly and sorted
 * by key so the same document always yields the same picture.
 */
export function layoutGraph(
  document: GraphDocument,
  width: number,
  height: number,
): Map<string, NodePosition> {
  const byKind = new Map<NodeKind, string[]>();
  for (const kind of BAND_ORDER) byKind.set(kind, []);
  const sorted = [...document.nodes].sort((a, b) =>
    a.key < b.key ? -1 : a.key > b.key ? 1 : 0,
  );
  for (const node of sorted) {
    byKind.get(node.kind)?.push(node.id);
  }

  const positions = new Map<string, NodePosition>();
  const bandHeight = height / BAND_ORDER.length;
  BAND_ORDER.forEach((kind, band) => {
    const ids = byKind.get(kind) ?? [];
    const y = bandHeight * band + bandHeight / 2;
    ids.forEach((id, index) => {
      const x = (width * (index + 1)) / (ids.length + 1);
      positions.set(id, { id, x, y, band });
    });
  });
  return positions;
}
