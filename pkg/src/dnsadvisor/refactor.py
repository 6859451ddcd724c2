"""Behavior-preserving refactorings over a corpus and its graph.

Each rule is matched against the current findings, applied as a pure
corpus-to-corpus transformation, and checked for preservation: resolution
answers that existed before must survive unchanged, while availability under
failure scenarios may only improve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import CutIndex, assemble_corpus
from .graph import DependencyGraph, build_graph
from .model import (ADDRESS_TYPES, Corpus, Organization, RecordType,
                    ResourceRecord, Server)
from .names import DomainName
from .resolver import ResolutionStatus, resolve
from .smells import (CYCLIC_DEPENDENCY, FALSE_REDUNDANCY, CatalogueConfig,
                     Finding, run_catalogue)

ADD_GLUE_RECORD = "add-glue-record"
MOVE_SERVER_LOCATION = "move-server-location"
ADD_SERVER_IN_LOCATION = "add-server-in-location"


class RefactoringError(ValueError):
    pass


class CannotSynthesizeGlue(RefactoringError):
    """The matched server has no known address; operator input is needed."""


class PreservationViolated(RefactoringError):
    pass


@dataclass(frozen=True)
class RefactoringRule:
    id: str
    title: str
    target_smell: str
    description: str
    parameters: dict

    def to_json(self) -> dict:
        return {"id": self.id, "title": self.title,
                "targetSmell": self.target_smell,
                "description": self.description,
                "parameters": self.parameters}


RULES: dict[str, RefactoringRule] = {
    ADD_GLUE_RECORD: RefactoringRule(
        ADD_GLUE_RECORD, "Add glue record", CYCLIC_DEPENDENCY,
        "Publish an address record for an out-of-bailiwick NS target in the "
        "file that delegates the dependent zone, cutting the resolution cycle.",
        {}),
    MOVE_SERVER_LOCATION: RefactoringRule(
        MOVE_SERVER_LOCATION, "Move server to another location", FALSE_REDUNDANCY,
        "Retarget one co-located server's deployment location to restore "
        "geographic diversity. Zone data is untouched.",
        {"locations": "candidate location pool (list of tokens)"}),
    ADD_SERVER_IN_LOCATION: RefactoringRule(
        ADD_SERVER_IN_LOCATION, "Add server in another location", FALSE_REDUNDANCY,
        "Introduce an additional name server for the zone in a new location, "
        "with NS and address records plus metadata.",
        {"locations": "candidate location pool (list of tokens)",
         "serverName": "optional name for the new server",
         "address": "optional IPv4 address for the new server"}),
}


@dataclass(frozen=True)
class RuleMatch:
    rule: str
    zone: str
    server: str | None
    site: str | None  # origin of the zone file the rule would edit
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"rule": self.rule, "zone": self.zone, "server": self.server,
                "site": self.site, "details": self.details}


def match_rule(corpus: Corpus, graph: DependencyGraph,
               rule: RefactoringRule | str,
               config: CatalogueConfig | None = None,
               findings: list[Finding] | None = None,
               cuts: CutIndex | None = None) -> list[RuleMatch]:
    """Deterministically enumerate the rule's left-hand-side occurrences."""
    if isinstance(rule, str):
        if rule not in RULES:
            raise RefactoringError(f"unknown rule id {rule!r}")
        rule = RULES[rule]
    if cuts is None:
        cuts = CutIndex(corpus)
    if config is None:
        config = CatalogueConfig()
    if findings is None:
        findings = run_catalogue(corpus, graph, config, cuts)

    matches: list[RuleMatch] = []
    if rule.id == ADD_GLUE_RECORD:
        for finding in findings:
            if finding.smell != CYCLIC_DEPENDENCY:
                continue
            zone = DomainName.parse(finding.zone)
            site = cuts.delegation(zone).site
            for witness in finding.evidence.get("missingGlue", []):
                name = DomainName.parse(witness)
                addresses = _glue_source_addresses(corpus, cuts, name)
                matches.append(RuleMatch(
                    rule.id, finding.zone, witness,
                    str(site) if site is not None else None,
                    {"addresses": addresses,
                     "cycle": finding.evidence.get("cycle", [])}))
    elif rule.id in (MOVE_SERVER_LOCATION, ADD_SERVER_IN_LOCATION):
        for finding in findings:
            if finding.smell != FALSE_REDUNDANCY:
                continue
            if finding.evidence.get("dimension") != "geographic":
                continue
            groups: dict[str, int] = finding.evidence.get("groups", {})
            crowded = max(sorted(groups), key=lambda token: groups[token])
            zone = DomainName.parse(finding.zone)
            co_located = sorted(
                str(t) for t in cuts.delegation(zone).targets
                if (s := corpus.server(t)) is not None and s.location == crowded)
            if rule.id == ADD_SERVER_IN_LOCATION:
                matches.append(RuleMatch(rule.id, finding.zone, None, None,
                                         {"crowdedLocation": crowded,
                                          "servers": co_located}))
                continue
            # Moving any co-located server but one restores diversity; the
            # first stays put so each listed move is individually valid.
            for server in co_located[1:]:
                matches.append(RuleMatch(rule.id, finding.zone, server, None,
                                         {"currentLocation": crowded}))
    else:
        raise RefactoringError(f"rule {rule.id} has no matcher")

    matches.sort(key=lambda m: (m.zone, m.server or "", str(m.details)))
    return matches


def _glue_source_addresses(corpus: Corpus, cuts: CutIndex,
                           name: DomainName) -> list[str]:
    """Address candidates for new glue: home-zone records, else metadata."""
    published = cuts.addresses_anywhere(name)
    if published:
        return sorted(set(published))
    server = corpus.server(name)
    if server is not None and server.addresses:
        return sorted(set(server.addresses))
    return []


def _replace_zone(corpus: Corpus, origin: DomainName, records) -> Corpus:
    zones = [z.with_records(tuple(records)) if z.origin == origin else z
             for z in corpus.zones]
    return Corpus(tuple(zones), corpus.servers, corpus.organizations,
                  corpus.root_origin)


def apply_add_glue_record(corpus: Corpus, match: RuleMatch) -> Corpus:
    """Append glue address records for the matched server to the delegating
    zone file. Never removes or rewrites existing records."""
    if match.site is None:
        raise RefactoringError(f"match for {match.server} has no delegation site")
    addresses = match.details.get("addresses") or []
    if not addresses:
        raise CannotSynthesizeGlue(
            f"no known address for {match.server}; operator input required")
    site = DomainName.parse(match.site)
    zone = corpus.zone(site)
    if zone is None:
        raise RefactoringError(f"no zone file with origin {match.site}")
    name = DomainName.parse(match.server)
    records = list(zone.records)
    for address in addresses:
        rtype = RecordType.AAAA if ":" in address else RecordType.A
        record = ResourceRecord(name, zone.default_ttl, "IN", rtype, address)
        if record not in records:
            records.append(record)
    return _replace_zone(corpus, site, records)


def _retarget_server(corpus: Corpus, name: DomainName, location: str) -> Corpus:
    servers = tuple(
        Server(s.name, s.addresses, location, s.asn, s.prefix, s.org, s.synthetic)
        if s.name == name else s
        for s in corpus.servers)
    return Corpus(corpus.zones, servers, corpus.organizations, corpus.root_origin)


def apply_move_server_location(corpus: Corpus, match: RuleMatch,
                               locations=(), target: str | None = None) -> Corpus:
    """Move the matched server's metadata location; zone files stay
    byte-identical. The default target is the pool entry maximizing the
    zone's post-move location diversity, ties broken lexicographically."""
    if match.server is None:
        raise RefactoringError("move-server-location needs a matched server")
    name = DomainName.parse(match.server)
    server = corpus.server(name)
    if server is None:
        raise RefactoringError(f"unknown server {match.server}")
    if target is None:
        pool = sorted(set(locations))
        if not pool:
            raise RefactoringError("empty location pool")
        cuts = CutIndex(corpus)
        zone = DomainName.parse(match.zone)
        others = {s.location for t in cuts.delegation(zone).targets
                  if (s := corpus.server(t)) is not None and t != name}
        # max keeps the first of equal keys; the sorted pool makes ties lexicographic.
        target = max(pool, key=lambda cand: len(others | {cand}))
    if target == server.location:
        raise RefactoringError(
            f"{match.server} is already in location {target!r}")
    return _retarget_server(corpus, name, target)


def apply_add_server_in_location(corpus: Corpus, match: RuleMatch, *,
                                 location: str, server_name: str | None = None,
                                 address: str | None = None,
                                 asn: str | None = None,
                                 prefix: str | None = None,
                                 org: str | None = None) -> Corpus:
    """Add a new name server for the zone in `location`: metadata entry plus
    NS and glue records in the zone's file (or its delegation site)."""
    zone_name = DomainName.parse(match.zone)
    cuts = CutIndex(corpus)
    existing = {str(s.name) for s in corpus.servers}
    if server_name is None:
        k = 1
        while f"ns{k}x.{zone_name}" in existing:
            k += 1
        server_name = f"ns{k}x.{zone_name}"
    name = DomainName.parse(server_name)
    if str(name) in existing:
        raise RefactoringError(f"server {name} already exists")
    if address is None:
        used = {a for s in corpus.servers for a in s.addresses}
        candidate = next((f"203.0.113.{i}" for i in range(1, 255)
                          if f"203.0.113.{i}" not in used), None)
        if candidate is None:
            raise RefactoringError("no free address in the synthesis pool")
        address = candidate

    site = cuts.delegation(zone_name).site
    if site is None:
        raise RefactoringError(f"zone {zone_name} has no file to edit")
    file_zone = corpus.zone(zone_name) or corpus.zone(site)
    assert file_zone is not None
    records = list(file_zone.records)
    records.append(ResourceRecord(zone_name, file_zone.default_ttl, "IN",
                                  RecordType.NS, name))
    rtype = RecordType.AAAA if ":" in address else RecordType.A
    records.append(ResourceRecord(name, file_zone.default_ttl, "IN", rtype, address))
    updated = _replace_zone(corpus, file_zone.origin, records)

    server = Server(name, (address,), location,
                    asn or f"AS-{name}", prefix or f"{address}/32",
                    org or f"org-{name}")
    servers = list(updated.servers) + [server]
    orgs = list(updated.organizations)
    return assemble_corpus(list(updated.zones), servers,
                           [Organization(o.id, o.name) for o in orgs],
                           updated.root_origin)


def apply_rule(corpus: Corpus, match: RuleMatch, params: dict | None = None) -> Corpus:
    params = params or {}
    if match.rule == ADD_GLUE_RECORD:
        return apply_add_glue_record(corpus, match)
    if match.rule == MOVE_SERVER_LOCATION:
        return apply_move_server_location(
            corpus, match, locations=params.get("locations", ()),
            target=params.get("target"))
    if match.rule == ADD_SERVER_IN_LOCATION:
        location = params.get("location")
        if location is None:
            crowded = match.details.get("crowdedLocation")
            pool = sorted(set(params.get("locations", ())))
            location = next((t for t in pool if t != crowded), None)
            if location is None:
                raise RefactoringError(
                    "no location outside the crowded one in the pool")
        return apply_add_server_in_location(
            corpus, match, location=location,
            server_name=params.get("serverName"),
            address=params.get("address"))
    raise RefactoringError(f"unknown rule id {match.rule!r}")


@dataclass(frozen=True)
class PreservationReport:
    verdict: str  # "Preserved" | "Violated"
    mismatches: tuple[dict, ...]
    improvement: int
    scenarios: tuple[dict, ...]

    def to_json(self) -> dict:
        return {"verdict": self.verdict,
                "mismatches": list(self.mismatches),
                "improvement": self.improvement,
                "scenarios": list(self.scenarios)}


def _address_owners(corpus: Corpus) -> list[DomainName]:
    owners: dict[DomainName, None] = {}
    for zone in corpus.zones:
        for record in zone.records:
            if record.rtype in ADDRESS_TYPES:
                owners.setdefault(record.owner)
    return sorted(owners, key=str)


def _probe_names(before: Corpus, after: Corpus) -> list[DomainName]:
    names: dict[DomainName, None] = {}
    for corpus in (before, after):
        for owner in _address_owners(corpus):
            names.setdefault(owner)
        for zone in corpus.zones:
            for record in zone.records:
                if record.rtype is RecordType.NS:
                    names.setdefault(record.rdata)
    return sorted(names, key=str)


def _failure_scenarios(corpus: Corpus, cuts: CutIndex) -> list[tuple[str, list[str]]]:
    scenarios: list[tuple[str, list[str]]] = []
    by_location: dict[str, list[str]] = {}
    for server in corpus.servers:
        by_location.setdefault(server.location, []).append(str(server.name))
    for location in sorted(by_location):
        scenarios.append((f"site:{location}", sorted(by_location[location])))
    for cut in cuts.cuts:
        in_bailiwick = sorted(
            str(t) for t in cuts.delegation(cut).targets
            if t.is_subdomain_of(cut))
        if in_bailiwick:
            scenarios.append((f"in-bailiwick:{cut}", in_bailiwick))
    return scenarios


def check_preservation(before: Corpus, after: Corpus) -> PreservationReport:
    """Preserved iff every no-failure answer set of `before` survives in
    `after`; improvement counts failure scenarios whose resolvable probe set
    strictly grows."""
    before_cuts = CutIndex(before)
    after_cuts = CutIndex(after)
    mismatches = []
    for owner in _address_owners(before):
        for qtype in (RecordType.A, RecordType.AAAA):
            b = resolve(before, owner, qtype, cuts=before_cuts)
            if b.status is not ResolutionStatus.RESOLVED:
                continue
            a = resolve(after, owner, qtype, cuts=after_cuts)
            if a.status is not ResolutionStatus.RESOLVED or \
                    a.addresses != b.addresses:
                mismatches.append({
                    "name": str(owner), "qtype": qtype.value,
                    "before": list(b.addresses),
                    "after": list(a.addresses) if
                    a.status is ResolutionStatus.RESOLVED else a.status.value})

    probes = _probe_names(before, after)
    scenario_reports = []
    improvement = 0
    # The same scenario label (a site knockout, a zone's in-bailiwick
    # knockout) can cover different server sets before and after: moving a
    # server out of a site shrinks that site's blast radius, and that is
    # exactly the improvement worth counting.
    before_scenarios = dict(_failure_scenarios(before, before_cuts))
    after_scenarios = dict(_failure_scenarios(after, after_cuts))
    for label in sorted(set(before_scenarios) | set(after_scenarios)):
        failed_before = before_scenarios.get(label, [])
        failed_after = after_scenarios.get(label, [])
        resolvable_before = {
            str(n) for n in probes
            if resolve(before, n, failed_servers=failed_before,
                       cuts=before_cuts).status is ResolutionStatus.RESOLVED}
        resolvable_after = {
            str(n) for n in probes
            if resolve(after, n, failed_servers=failed_after,
                       cuts=after_cuts).status is ResolutionStatus.RESOLVED}
        improved = resolvable_before < resolvable_after
        if improved:
            improvement += 1
        scenario_reports.append({
            "scenario": label,
            "failedServersBefore": failed_before,
            "failedServersAfter": failed_after,
            "resolvableBefore": sorted(resolvable_before),
            "resolvableAfter": sorted(resolvable_after),
            "improved": improved})

    verdict = "Preserved" if not mismatches else "Violated"
    return PreservationReport(verdict, tuple(mismatches), improvement,
                              tuple(scenario_reports))


@dataclass(frozen=True)
class RefactoringOutcome:
    corpus: Corpus
    graph: DependencyGraph
    applied: tuple[dict, ...]
    recommendations: tuple[dict, ...]
    findings: tuple[Finding, ...]
    complete: bool

    def to_json(self) -> dict:
        return {"applied": list(self.applied),
                "recommendations": list(self.recommendations),
                "remainingFindings": [f.to_json() for f in self.findings],
                "complete": self.complete}


def refactor_until_clean(corpus: Corpus, rules, config: CatalogueConfig | None = None,
                         budget: int = 100,
                         params: dict | None = None) -> RefactoringOutcome:
    """Apply the given rules until none of their target smells remain.

    One deterministic match is applied per step, preservation-checked, and
    detection re-runs on the result. `complete` is False when the budget ran
    out with matches outstanding.
    """
    if config is None:
        config = CatalogueConfig()
    params = params or {}
    rule_objs = []
    for rule in rules:
        if isinstance(rule, str):
            if rule not in RULES:
                raise RefactoringError(f"unknown rule id {rule!r}")
            rule_objs.append(RULES[rule])
        else:
            rule_objs.append(rule)

    applied: list[dict] = []
    recommendations: list[dict] = []
    skipped: set[str] = set()
    steps = 0
    while True:
        cuts = CutIndex(corpus)
        graph = build_graph(corpus, cuts)
        findings = run_catalogue(corpus, graph, config, cuts)
        progressed = False
        for rule in rule_objs:
            matches = [m for m in match_rule(corpus, graph, rule, config,
                                             findings, cuts)
                       if str(m.to_json()) not in skipped]
            if not matches:
                continue
            if steps >= budget:
                return RefactoringOutcome(corpus, graph, tuple(applied),
                                          tuple(recommendations),
                                          tuple(findings), False)
            match = matches[0]
            steps += 1
            try:
                candidate = apply_rule(corpus, match, params.get(rule.id))
            except RefactoringError as exc:
                # Matches that cannot be applied automatically (no known glue
                # address, empty location pool) become recommendations.
                recommendations.append({"match": match.to_json(),
                                        "reason": str(exc)})
                skipped.add(str(match.to_json()))
                progressed = True
                break
            report = check_preservation(corpus, candidate)
            if report.verdict != "Preserved":
                raise PreservationViolated(
                    f"rule {rule.id} on {match.zone} broke resolution: "
                    f"{list(report.mismatches)[:3]}")
            corpus = candidate
            applied.append({"rule": rule.id, "match": match.to_json(),
                            "preservation": report.verdict,
                            "improvement": report.improvement})
            progressed = True
            break
        if not progressed:
            return RefactoringOutcome(corpus, graph, tuple(applied),
                                      tuple(recommendations),
                                      tuple(findings), True)
