import pytest

from dnsadvisor.corpus import assemble_corpus
from dnsadvisor.graph import (EdgeKind, NodeKind, build_graph, export_graph,
                              find_dependency_cycles, import_graph,
                              zone_dependency_closure)
from dnsadvisor.zonefile import parse_zone_file


def kind_counts(graph):
    counts = {}
    for node in graph.nodes:
        counts[node.kind] = counts.get(node.kind, 0) + 1
    return counts


def test_case1_graph_composition(case1):
    graph = build_graph(case1)
    assert len(graph.nodes) == 27 and len(graph.edges) == 52
    assert kind_counts(graph) == {NodeKind.ZONE: 5, NodeKind.SERVER: 8,
                                  NodeKind.ORGANIZATION: 3,
                                  NodeKind.LOCATION: 3, NodeKind.NETWORK: 8}
    assert graph.root == "zone:."


def test_edges_are_unique_and_sorted(case1):
    graph = build_graph(case1)
    triples = [(e.kind.value, e.source, e.target) for e in graph.edges]
    assert len(set(triples)) == len(triples)
    assert triples == sorted(triples)
    assert [n.id for n in graph.nodes] == sorted(n.id for n in graph.nodes)


def test_server_home_zones(case1):
    graph = build_graph(case1)
    assert graph.node("server:ns1.example.com.").home_zone == "zone:example.com."
    assert graph.node("server:a.gtld.com.").home_zone == "zone:com."


def test_external_ns_target_gets_placeholder_zone():
    corpus = assemble_corpus([parse_zone_file(
        "$ORIGIN z.test.\n"
        "@ NS ns.offsite.example.\n"
        "ns.offsite.example. A 10.0.0.1\n")], [], [])
    graph = build_graph(corpus)
    placeholder = graph.node("zone:offsite.example.")
    assert placeholder is not None and placeholder.kind is NodeKind.ZONE
    assert graph.node("server:ns.offsite.example.").home_zone == placeholder.id
    parents = graph.out_edges(placeholder.id, EdgeKind.PARENT_DEP)
    assert [e.target for e in parents] == ["zone:."]


def test_dependency_closure(case1):
    graph = build_graph(case1)
    assert zone_dependency_closure(graph, "example.com.") == {
        ".", "com.", "net.", "example.net."}
    assert zone_dependency_closure(graph, "com.") == {"."}
    with pytest.raises(KeyError, match="unknown zone"):
        zone_dependency_closure(graph, "nosuch.test.")


def test_closure_follows_alias_targets():
    corpus = assemble_corpus(
        [parse_zone_file("$ORIGIN a.test.\n"
                         "@ NS ns1\nns1 A 10.0.0.1\n"
                         "www CNAME web.b.test.\n"),
         parse_zone_file("$ORIGIN b.test.\n"
                         "@ NS ns1\nns1 A 10.0.1.1\n"
                         "web A 10.0.1.7\n")], [], [])
    graph = build_graph(corpus)
    assert "b.test." in zone_dependency_closure(graph, "a.test.")
    assert any(e.kind is EdgeKind.CNAME_DEP for e in graph.edges)


def test_export_shape_and_import_round_trip(case1):
    graph = build_graph(case1)
    doc = export_graph(graph)
    assert set(doc) == {"nodes", "edges", "root"}
    assert all(set(n) == {"id", "kind", "key"} for n in doc["nodes"])
    assert all(set(e) == {"source", "target", "kind"} for e in doc["edges"])
    assert export_graph(import_graph(doc)) == doc


def test_projection_edges(case1):
    graph = build_graph(case1)
    shaped = [(e.source, e.target, e.witness) for e in graph.projection]
    assert shaped == [
        ("example.com.", "example.net.", "dns1.example.net."),
        ("example.com.", "example.net.", "dns2.example.net."),
        ("example.net.", "example.com.", None),
    ]


def test_case1_cycles(case1):
    cycles = find_dependency_cycles(build_graph(case1))
    assert [(c.zones, c.witnesses) for c in cycles] == [
        (("example.com.", "example.net."), ("dns1.example.net.", None)),
        (("example.com.", "example.net."), ("dns2.example.net.", None)),
    ]


def test_repair_clears_cycles(case1_refactored):
    graph = build_graph(case1_refactored)
    assert find_dependency_cycles(graph) == []
    # Only the collapsed reverse dependency survives; the witnessed edges
    # that closed the ring are gone because the glue now sits at the site.
    shaped = [(e.source, e.target, e.witness) for e in graph.projection]
    assert shaped == [("example.net.", "example.com.", None)]


def test_build_is_deterministic(case1):
    assert export_graph(build_graph(case1)) == export_graph(build_graph(case1))
