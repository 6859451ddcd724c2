import json

import pytest

from dnsadvisor.corpus import CorpusError, CutIndex, load_corpus
from dnsadvisor.names import DomainName

from conftest import FIXTURES, fixture_corpus, fixture_paths


def name(text):
    return DomainName.parse(text)


def test_minimal_fixture_loads_two_zones_four_servers(minimal):
    assert len(minimal.zones) == 2
    assert {str(z.origin) for z in minimal.zones} == {"alpha.test.", "beta.test."}
    real = [s for s in minimal.servers if not s.synthetic]
    assert len(real) == 4
    assert all(s.location and s.asn and s.prefix for s in real)


def test_empty_corpus_rejected():
    with pytest.raises(CorpusError, match="corpus requires at least one zone"):
        load_corpus([])


def test_missing_zone_file():
    with pytest.raises(CorpusError, match="zone file not found"):
        load_corpus([FIXTURES / "case1" / "nope.zone"])


def test_missing_metadata_file():
    zones, _ = fixture_paths("case1")
    with pytest.raises(CorpusError, match="metadata file not found"):
        load_corpus(zones, FIXTURES / "case1" / "nope.json")


def test_invalid_metadata_json(tmp_path):
    bad = tmp_path / "meta.json"
    bad.write_text("{not json")
    zones, _ = fixture_paths("minimal")
    with pytest.raises(CorpusError, match="invalid JSON"):
        load_corpus(zones, bad)


def test_servers_without_metadata_are_synthetic():
    corpus = fixture_corpus("dim", metadata=False)
    assert corpus.servers and all(s.synthetic for s in corpus.servers)
    assert all(not s.addresses for s in corpus.servers)


def test_case1_server_metadata(case1):
    by_name = {str(s.name): s for s in case1.servers}
    dns1 = by_name["dns1.example.net."]
    assert dns1.addresses == ("1.1.1.3",)
    assert dns1.org == "org-b" and not dns1.synthetic
    orgs = {o.id for o in case1.organizations}
    assert {"org-a", "org-b", "org-tld"} <= orgs


def test_cut_enumeration(case1):
    cuts = CutIndex(case1)
    assert [str(c) for c in cuts.cuts] == [
        ".", "com.", "net.", "example.com.", "example.net."]


def test_delegation_site_and_glue_first_order(case1):
    cuts = CutIndex(case1)
    deleg = cuts.delegation(name("example.com."))
    assert str(deleg.site) == "com."
    targets = [str(t) for t in deleg.targets]
    assert set(targets) == {"ns1.example.com.", "ns2.example.com.",
                            "dns1.example.net.", "dns2.example.net."}
    assert targets[:2] == ["ns1.example.com.", "ns2.example.com."]


def test_glue_lookup(case1):
    cuts = CutIndex(case1)
    example = name("example.com.")
    assert cuts.glue_for(example, name("ns1.example.com.")) == ["1.1.1.1"]
    assert cuts.glue_for(example, name("dns1.example.net.")) == []
    assert cuts.addresses_anywhere(name("dns1.example.net.")) == []
    assert cuts.addresses_anywhere(name("ns2.example.com.")) == ["1.1.1.2"]


def test_navigation_towards_a_name(case1):
    cuts = CutIndex(case1)
    probe = name("www.example.com.")
    assert str(cuts.next_cut_towards(name("."), probe)) == "com."
    assert str(cuts.next_cut_towards(name("com."), probe)) == "example.com."
    assert cuts.next_cut_towards(name("example.com."), probe) is None
    assert str(cuts.home_cut(probe)) == "example.com."


def test_enclosing_file_zone(case1):
    cuts = CutIndex(case1)
    enclosing = cuts.enclosing_file_zone(name("ns1.example.com."))
    assert str(enclosing.origin) == "com."
    proper = cuts.enclosing_file_zone(name("com."), proper=True)
    assert proper is None


def test_records_under_cut_spans_files(case1):
    cuts = CutIndex(case1)
    owners = {str(r.owner) for r in cuts.records_under(name("example.com."))}
    assert owners == {"example.com.", "ns1.example.com.", "ns2.example.com."}


def test_glue_sites(case2):
    cuts = CutIndex(case2)
    sites = cuts.glue_sites_for(name("dns1.example.net."))
    assert [str(z.origin) for z in sites] == ["com."]


def test_metadata_schema_errors(tmp_path):
    bad = tmp_path / "meta.json"
    bad.write_text(json.dumps({"servers": [{"name": "x.test."}]}))
    zones, _ = fixture_paths("minimal")
    with pytest.raises(CorpusError):
        load_corpus(zones, bad)
