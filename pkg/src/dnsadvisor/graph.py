"""Multi-plane dependency graph: construction, export, closure, cycles."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import networkx as nx

from .corpus import CutIndex
from .model import Corpus, RecordType
from .names import DomainName


class NodeKind(enum.Enum):
    ZONE = "zone"
    SERVER = "server"
    ORGANIZATION = "organization"
    LOCATION = "location"
    NETWORK = "network"


class EdgeKind(enum.Enum):
    PARENT_DEP = "parent-dep"
    NS_DEP = "ns-dep"
    CNAME_DEP = "cname-dep"
    HOSTS = "hosts"
    MANAGES = "manages"
    LOCATED_IN = "located-in"
    ANNOUNCED_BY = "announced-by"


def node_id(kind: NodeKind, key: str) -> str:
    return f"{kind.value}:{key}"


@dataclass(frozen=True)
class GraphNode:
    id: str
    kind: NodeKind
    key: str
    home_zone: str | None = None  # servers only: zone node id the name lives under


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    kind: EdgeKind


@dataclass(frozen=True)
class ProjectionEdge:
    """A zone-level resolution dependency contributed by one or more NS
    targets lacking glue at the source zone's delegation site.

    `witness` names the target when its address is published nowhere in the
    corpus (the dependency is unavoidable); collapsed edges for targets that
    do have an address elsewhere carry None.
    """

    source: str
    target: str
    witness: str | None


@dataclass(frozen=True)
class Cycle:
    """An elementary cycle of zones with per-hop witnesses."""

    zones: tuple[str, ...]
    witnesses: tuple[str | None, ...]


@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]
    root: str
    projection: tuple[ProjectionEdge, ...] = field(default=(), compare=False)

    def node(self, ident: str) -> GraphNode | None:
        for node in self.nodes:
            if node.id == ident:
                return node
        return None

    def out_edges(self, source: str, kind: EdgeKind) -> list[GraphEdge]:
        return [e for e in self.edges if e.source == source and e.kind is kind]


def build_graph(corpus: Corpus, cuts: CutIndex | None = None) -> DependencyGraph:
    """Build the typed graph over zones, servers, organizations, locations
    and networks, anchored at the corpus top anchor."""
    if cuts is None:
        cuts = CutIndex(corpus)
    anchor = corpus.root_origin

    zone_keys: dict[str, DomainName] = {str(c): c for c in cuts.cuts}
    servers = {s.name: s for s in corpus.servers}

    def server_home(name: DomainName) -> str:
        home = cuts.home_cut(name)
        if home == anchor and not name.is_root and name.parent() != anchor \
                and not any(name.is_subdomain_of(c) and c != anchor for c in cuts.cuts):
            # External name: give it a placeholder zone for its parent domain.
            external = name.parent()
            zone_keys.setdefault(str(external), external)
            return node_id(NodeKind.ZONE, str(external))
        return node_id(NodeKind.ZONE, str(home))

    server_nodes: dict[DomainName, GraphNode] = {}
    edges: set[GraphEdge] = set()

    for server in corpus.servers:
        home = server_home(server.name)
        sid = node_id(NodeKind.SERVER, str(server.name))
        server_nodes[server.name] = GraphNode(sid, NodeKind.SERVER,
                                              str(server.name), home)

    ns_pairs: list[tuple[DomainName, DomainName]] = []
    for cut in cuts.cuts:
        for target in cuts.delegation(cut).targets:
            ns_pairs.append((cut, target))

    org_ids, loc_ids, net_ids = set(), set(), set()
    for cut, target in ns_pairs:
        zid = node_id(NodeKind.ZONE, str(cut))
        node = server_nodes.get(target)
        if node is None:
            home = server_home(target)
            node = GraphNode(node_id(NodeKind.SERVER, str(target)),
                             NodeKind.SERVER, str(target), home)
            server_nodes[target] = node
        edges.add(GraphEdge(zid, node.id, EdgeKind.NS_DEP))
        edges.add(GraphEdge(node.id, zid, EdgeKind.HOSTS))

    for server in corpus.servers:
        node = server_nodes[server.name]
        oid = node_id(NodeKind.ORGANIZATION, server.org)
        lid = node_id(NodeKind.LOCATION, server.location)
        nid = node_id(NodeKind.NETWORK, server.asn)
        org_ids.add(server.org)
        loc_ids.add(server.location)
        net_ids.add(server.asn)
        edges.add(GraphEdge(oid, node.id, EdgeKind.MANAGES))
        edges.add(GraphEdge(node.id, lid, EdgeKind.LOCATED_IN))
        edges.add(GraphEdge(node.id, nid, EdgeKind.ANNOUNCED_BY))

    for zone in corpus.zones:
        for record in zone.records:
            if record.rtype is not RecordType.CNAME:
                continue
            source_cut = cuts.home_cut(record.owner)
            target_cut = cuts.home_cut(record.rdata)
            if source_cut != target_cut:
                edges.add(GraphEdge(node_id(NodeKind.ZONE, str(source_cut)),
                                    node_id(NodeKind.ZONE, str(target_cut)),
                                    EdgeKind.CNAME_DEP))

    # Parent chain: every zone node except the anchor points at the deepest
    # known zone above it, bottoming out at the anchor.
    for key, origin in list(zone_keys.items()):
        if origin == anchor:
            continue
        parent = anchor
        for other in zone_keys.values():
            if origin.is_proper_subdomain_of(other) and \
                    len(other.labels) > len(parent.labels):
                parent = other
        edges.add(GraphEdge(node_id(NodeKind.ZONE, key),
                            node_id(NodeKind.ZONE, str(parent)),
                            EdgeKind.PARENT_DEP))

    nodes: list[GraphNode] = []
    for key in zone_keys:
        nodes.append(GraphNode(node_id(NodeKind.ZONE, key), NodeKind.ZONE, key))
    nodes.extend(server_nodes.values())
    for org in sorted(org_ids):
        nodes.append(GraphNode(node_id(NodeKind.ORGANIZATION, org),
                               NodeKind.ORGANIZATION, org))
    for loc in sorted(loc_ids):
        nodes.append(GraphNode(node_id(NodeKind.LOCATION, loc),
                               NodeKind.LOCATION, loc))
    for net in sorted(net_ids):
        nodes.append(GraphNode(node_id(NodeKind.NETWORK, net),
                               NodeKind.NETWORK, net))
    nodes.sort(key=lambda n: n.id)

    projection = tuple(_resolution_projection(cuts))
    return DependencyGraph(tuple(nodes), tuple(sorted(
        edges, key=lambda e: (e.kind.value, e.source, e.target))),
        node_id(NodeKind.ZONE, str(anchor)), projection)


def _resolution_projection(cuts: CutIndex) -> list[ProjectionEdge]:
    """Zone-level dependency edges through glue-less NS targets.

    A target with no published address anywhere yields its own witnessed
    edge; targets resolvable out-of-band collapse to one edge per zone pair.
    """
    witnessed: list[ProjectionEdge] = []
    collapsed: set[tuple[str, str]] = set()
    for cut in cuts.cuts:
        for target in cuts.delegation(cut).targets:
            home = cuts.home_cut(target)
            if home == cut:
                continue
            if cuts.glue_for(cut, target):
                continue
            src, dst = str(cut), str(home)
            if cuts.addresses_anywhere(target):
                collapsed.add((src, dst))
            else:
                witnessed.append(ProjectionEdge(src, dst, str(target)))
    out = witnessed + [ProjectionEdge(s, d, None) for s, d in collapsed]
    out.sort(key=lambda e: (e.source, e.target, e.witness or ""))
    return out


def export_graph(graph: DependencyGraph) -> dict:
    """The stable JSON form served to clients and written by the CLI."""
    return {
        "nodes": [{"id": n.id, "kind": n.kind.value, "key": n.key}
                  for n in graph.nodes],
        "edges": [{"source": e.source, "target": e.target, "kind": e.kind.value}
                  for e in graph.edges],
        "root": graph.root,
    }


def import_graph(document: dict) -> DependencyGraph:
    """Rebuild a graph from its export; inverse of export_graph up to the
    fields the export carries."""
    nodes = tuple(GraphNode(n["id"], NodeKind(n["kind"]), n["key"])
                  for n in document["nodes"])
    edges = tuple(GraphEdge(e["source"], e["target"], EdgeKind(e["kind"]))
                  for e in document["edges"])
    return DependencyGraph(nodes, edges, document["root"])


def zone_dependency_closure(graph: DependencyGraph, zone: str | DomainName) -> set[str]:
    """Zones whose state can affect resolution under `zone`: parents, the
    home zones of its NS targets and alias targets, transitively. The zone
    itself is excluded."""
    start = node_id(NodeKind.ZONE, str(zone)) if ":" not in str(zone) else str(zone)
    if graph.node(start) is None:
        raise KeyError(f"unknown zone node {start}")
    seen: set[str] = set()
    frontier = [start]
    while frontier:
        current = frontier.pop()
        for edge in graph.out_edges(current, EdgeKind.PARENT_DEP):
            if edge.target not in seen:
                seen.add(edge.target)
                frontier.append(edge.target)
        for edge in graph.out_edges(current, EdgeKind.CNAME_DEP):
            if edge.target not in seen:
                seen.add(edge.target)
                frontier.append(edge.target)
        for edge in graph.out_edges(current, EdgeKind.NS_DEP):
            server = graph.node(edge.target)
            if server is not None and server.home_zone is not None:
                if server.home_zone not in seen:
                    seen.add(server.home_zone)
                    frontier.append(server.home_zone)
    seen.discard(start)
    return {graph.node(n).key for n in seen}


def find_dependency_cycles(graph: DependencyGraph) -> list[Cycle]:
    """Enumerate elementary cycles of the resolution-dependency projection.

    Parallel witnessed edges are distinct, so a cycle is reported once per
    unavoidable missing-glue dependency it runs through. Cycles are rotated
    to start at their smallest zone id and sorted.
    """
    by_pair: dict[tuple[str, str], list[str | None]] = {}
    digraph = nx.DiGraph()
    for edge in graph.projection:
        by_pair.setdefault((edge.source, edge.target), []).append(edge.witness)
        digraph.add_edge(edge.source, edge.target)

    cycles: list[Cycle] = []
    for ring in nx.simple_cycles(digraph):
        smallest = min(range(len(ring)), key=lambda i: ring[i])
        ring = ring[smallest:] + ring[:smallest]
        hop_choices = []
        for i, src in enumerate(ring):
            dst = ring[(i + 1) % len(ring)]
            hop_choices.append(sorted(by_pair[(src, dst)],
                                      key=lambda w: (w is None, w or "")))
        for witnesses in itertools.product(*hop_choices):
            cycles.append(Cycle(tuple(ring), tuple(witnesses)))
    cycles.sort(key=lambda c: (c.zones, tuple(w or "" for w in c.witnesses)))
    return cycles
