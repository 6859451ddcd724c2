"""File-oriented reporting: graph pictures, metric tables and charts.

matplotlib runs on the Agg backend so everything renders headlessly to files.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.lines import Line2D

from .corpus import CutIndex
from .graph import DependencyGraph, EdgeKind, NodeKind
from .metrics import (administrative_complexity, server_redundancy,
                      zone_influence)
from .model import Corpus
from .smells import HIGH_ADMINISTRATIVE_COMPLEXITY, CatalogueConfig

# Vertical bands, one per node kind, top to bottom.
_BANDS = [NodeKind.ZONE, NodeKind.SERVER, NodeKind.ORGANIZATION,
          NodeKind.LOCATION, NodeKind.NETWORK]

_NODE_COLORS = {
    NodeKind.ZONE: "#4c72b0",
    NodeKind.SERVER: "#dd8452",
    NodeKind.ORGANIZATION: "#55a868",
    NodeKind.LOCATION: "#c44e52",
    NodeKind.NETWORK: "#8172b3",
}

_EDGE_COLORS = {
    EdgeKind.PARENT_DEP: "#4c72b0",
    EdgeKind.NS_DEP: "#dd8452",
    EdgeKind.CNAME_DEP: "#937860",
    EdgeKind.HOSTS: "#999999",
    EdgeKind.MANAGES: "#55a868",
    EdgeKind.LOCATED_IN: "#c44e52",
    EdgeKind.ANNOUNCED_BY: "#8172b3",
}


def render_graph_figure(graph: DependencyGraph, path: str | Path) -> Path:
    """Draw the multi-plane graph with one horizontal band per node kind."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    positions: dict[str, tuple[float, float]] = {}
    for row, kind in enumerate(_BANDS):
        members = [n for n in graph.nodes if n.kind is kind]
        members.sort(key=lambda n: n.key)
        for col, node in enumerate(members):
            span = max(len(members) - 1, 1)
            x = col / span if len(members) > 1 else 0.5
            positions[node.id] = (x, float(len(_BANDS) - 1 - row))

    width = max(8.0, 1.6 * max(
        (sum(1 for n in graph.nodes if n.kind is kind) for kind in _BANDS),
        default=1))
    fig, ax = plt.subplots(figsize=(width, 7.5))
    for edge in graph.edges:
        x0, y0 = positions[edge.source]
        x1, y1 = positions[edge.target]
        ax.annotate(
            "", xy=(x1, y1), xytext=(x0, y0),
            arrowprops={"arrowstyle": "-|>", "shrinkA": 12, "shrinkB": 12,
                        "color": _EDGE_COLORS[edge.kind], "lw": 1.1,
                        "connectionstyle": "arc3,rad=0.08"})
    for node in graph.nodes:
        x, y = positions[node.id]
        ax.scatter([x], [y], s=260, color=_NODE_COLORS[node.kind], zorder=3,
                   edgecolors="#333333", linewidths=0.6)
        ax.annotate(node.key, (x, y), textcoords="offset points",
                    xytext=(0, 13), ha="center", fontsize=7.5)
    for row, kind in enumerate(_BANDS):
        ax.text(-0.12, float(len(_BANDS) - 1 - row), kind.value,
                ha="right", va="center", fontsize=9, fontstyle="italic",
                color="#555555")

    handles = [Line2D([], [], color=color, label=kind.value)
               for kind, color in _EDGE_COLORS.items()]
    ax.legend(handles=handles, loc="upper left", bbox_to_anchor=(1.01, 1.0),
              fontsize=8, frameon=False, title="edges", title_fontsize=8)
    ax.set_xlim(-0.35, 1.1)
    ax.set_ylim(-0.6, len(_BANDS) - 0.2)
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


METRIC_COLUMNS = ["zone", "administrativeComplexity", "serverRedundancy",
                  "geographicRedundancy", "networkRedundancy",
                  "prefixRedundancy", "zoneInfluence", "confidence"]


def metrics_table(corpus: Corpus, graph: DependencyGraph,
                  cuts: CutIndex | None = None,
                  config: CatalogueConfig | None = None) -> list[dict]:
    """One row of every metric per zone that has name servers."""
    if cuts is None:
        cuts = CutIndex(corpus)
    if config is None:
        config = CatalogueConfig()
    rows = []
    for cut in cuts.cuts:
        if not cuts.delegation(cut).targets:
            continue
        ac = administrative_complexity(corpus, cut, cuts, config.ac_exponent)
        redundancy = {m.name: m for m in server_redundancy(corpus, cut, cuts)}
        influence = zone_influence(graph, str(cut))
        confidence = "full"
        if any(m.confidence == "partial"
               for m in [ac, influence, *redundancy.values()]):
            confidence = "partial"
        rows.append({
            "zone": str(cut),
            "administrativeComplexity": ac.value,
            "serverRedundancy": redundancy["ServerRedundancy"].value,
            "geographicRedundancy": redundancy["GeographicRedundancy"].value,
            "networkRedundancy": redundancy["NetworkRedundancy"].value,
            "prefixRedundancy": redundancy["PrefixRedundancy"].value,
            "zoneInfluence": influence.value,
            "confidence": confidence,
        })
    rows.sort(key=lambda row: row["zone"])
    return rows


def write_metrics_csv(rows: list[dict], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=METRIC_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def render_metrics_figure(rows: list[dict], path: str | Path,
                          ac_threshold: float | None = None) -> Path:
    """Grouped redundancy bars per zone beside an administrative-complexity
    bar chart with the configured threshold marked."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    zones = [row["zone"] for row in rows]
    fig, (left, right) = plt.subplots(
        1, 2, figsize=(max(9.0, 2.2 * len(zones) + 4), 4.6))

    dimensions = [("serverRedundancy", "servers"),
                  ("geographicRedundancy", "locations"),
                  ("networkRedundancy", "networks"),
                  ("prefixRedundancy", "prefixes")]
    width = 0.2
    for i, (column, label) in enumerate(dimensions):
        xs = [j + (i - 1.5) * width for j in range(len(zones))]
        left.bar(xs, [row[column] for row in rows], width=width, label=label)
    left.set_xticks(range(len(zones)))
    left.set_xticklabels(zones, rotation=20, ha="right", fontsize=8)
    left.set_ylabel("distinct count")
    left.set_title("redundancy by dimension", fontsize=10)
    left.legend(fontsize=8, frameon=False)
    left.yaxis.get_major_locator().set_params(integer=True)

    right.bar(range(len(zones)),
              [row["administrativeComplexity"] for row in rows],
              color="#4c72b0", width=0.5)
    if ac_threshold is not None:
        right.axhline(ac_threshold, color="#c44e52", lw=1.2, ls="--",
                      label=f"threshold {ac_threshold:g}")
        right.legend(fontsize=8, frameon=False)
    right.set_xticks(range(len(zones)))
    right.set_xticklabels(zones, rotation=20, ha="right", fontsize=8)
    right.set_ylim(0.0, 1.05)
    right.set_ylabel("Ac")
    right.set_title("administrative complexity", fontsize=10)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
