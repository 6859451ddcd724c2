"""Operational bad-smell catalogue: taxonomy, detectors, threshold config."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .corpus import CutIndex
from .graph import (DependencyGraph, NodeKind, find_dependency_cycles,
                    node_id, zone_dependency_closure)
from .metrics import AC_LITERAL, administrative_complexity, server_redundancy
from .model import Corpus
from .names import DomainName


class Plane(enum.Enum):
    DATA = "Data"
    CONTROL = "Control"
    MANAGEMENT = "Management"


class EntityScope(enum.Enum):
    SINGLE_TYPE = "SingleType"
    INTER_TYPE = "InterType"
    INTRA_TYPE = "IntraType"
    INTER_ZONE = "InterZone"
    INTRA_ZONE = "IntraZone"


class PropertyKind(enum.Enum):
    LEXICAL = "Lexical"
    STRUCTURAL = "Structural"
    MEASURABLE = "Measurable"


class Severity(enum.Enum):
    CRITICAL = "critical"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class TaxonomyTags:
    planes: tuple[Plane, ...]
    entity_scope: EntityScope
    property_kind: PropertyKind


@dataclass(frozen=True)
class SmellDefinition:
    id: str
    title: str
    description: str
    tags: TaxonomyTags
    impacts: tuple[str, ...]
    refactorings: tuple[str, ...]
    severity: Severity


@dataclass(frozen=True)
class Finding:
    smell: str
    zone: str
    severity: Severity
    locations: tuple[str, ...]
    evidence: dict
    impacts: tuple[str, ...]
    suggested_refactorings: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "smell": self.smell,
            "zone": self.zone,
            "severity": self.severity.value,
            "locations": list(self.locations),
            "evidence": self.evidence,
            "impacts": list(self.impacts),
            "suggestedRefactorings": list(self.suggested_refactorings),
        }


CYCLIC_DEPENDENCY = "cyclic-dependency"
FALSE_REDUNDANCY = "false-redundancy"
DIMINISHED_REDUNDANCY = "diminished-redundancy"
EXCESSIVE_ZONE_INFLUENCE = "excessive-zone-influence"
HIGH_ADMINISTRATIVE_COMPLEXITY = "high-administrative-complexity"

CATALOGUE: dict[str, SmellDefinition] = {
    CYCLIC_DEPENDENCY: SmellDefinition(
        CYCLIC_DEPENDENCY,
        "Cyclic zone dependency",
        "Zones depend on each other to resolve their own name servers, so a "
        "partial outage can make every zone on the cycle unreachable.",
        TaxonomyTags((Plane.DATA, Plane.CONTROL), EntityScope.INTRA_ZONE,
                     PropertyKind.STRUCTURAL),
        ("Reduced availability", "reduced resiliency"),
        ("add-glue-record",),
        Severity.CRITICAL),
    FALSE_REDUNDANCY: SmellDefinition(
        FALSE_REDUNDANCY,
        "False server redundancy",
        "A zone's name servers look plural but collapse onto one location, "
        "network or prefix, leaving a shared point of failure.",
        TaxonomyTags((Plane.CONTROL,), EntityScope.INTER_ZONE,
                     PropertyKind.MEASURABLE),
        ("Reduced availability", "decreased resilience",
         "susceptible to a single point of failure at certain granularity"),
        ("move-server-location", "add-server-in-location"),
        Severity.WARNING),
    DIMINISHED_REDUNDANCY: SmellDefinition(
        DIMINISHED_REDUNDANCY,
        "Diminished server redundancy",
        "A zone advertises fewer usable name servers than the minimum, or "
        "several NS names answer from one address set.",
        TaxonomyTags((Plane.CONTROL,), EntityScope.SINGLE_TYPE,
                     PropertyKind.MEASURABLE),
        ("Reduced availability",),
        ("add-server-in-location",),
        Severity.WARNING),
    EXCESSIVE_ZONE_INFLUENCE: SmellDefinition(
        EXCESSIVE_ZONE_INFLUENCE,
        "Excessive zone influence",
        "Resolution under a zone transitively trusts more foreign zones than "
        "the configured bound.",
        TaxonomyTags((Plane.CONTROL,), EntityScope.INTER_ZONE,
                     PropertyKind.MEASURABLE),
        ("Enlarged attack and failure surface through transitive trust",),
        (),
        Severity.WARNING),
    HIGH_ADMINISTRATIVE_COMPLEXITY: SmellDefinition(
        HIGH_ADMINISTRATIVE_COMPLEXITY,
        "High administrative complexity",
        "Control over a zone's name servers is fragmented across many "
        "organizations.",
        TaxonomyTags((Plane.MANAGEMENT,), EntityScope.INTER_TYPE,
                     PropertyKind.MEASURABLE),
        ("Coordination overhead and slower incident response",),
        (),
        Severity.WARNING),
}


class ConfigError(ValueError):
    pass


_DEFAULTS = {
    FALSE_REDUNDANCY: {"minLocations": 2, "minAsns": 2, "minPrefixes": 2},
    EXCESSIVE_ZONE_INFLUENCE: {"maxInfluence": 8},
    # 0.9 tolerates the balanced two-organization mutual-hosting layout and
    # still flags three-way-or-worse fragmentation.
    HIGH_ADMINISTRATIVE_COMPLEXITY: {"maxAc": 0.9},
    DIMINISHED_REDUNDANCY: {"minServers": 2},
}


@dataclass
class CatalogueConfig:
    thresholds: dict = field(default_factory=dict)
    ac_exponent: str = AC_LITERAL

    def __post_init__(self) -> None:
        merged = {smell: dict(values) for smell, values in _DEFAULTS.items()}
        for smell, values in self.thresholds.items():
            if smell not in CATALOGUE:
                raise ConfigError(f"unknown smell id in config: {smell!r}")
            if smell not in merged:
                merged[smell] = {}
            for key, value in values.items():
                if key not in _DEFAULTS.get(smell, {}):
                    raise ConfigError(f"unknown threshold {key!r} for {smell}")
                merged[smell][key] = value
        self.thresholds = merged

    @classmethod
    def from_json(cls, raw: dict) -> "CatalogueConfig":
        if not isinstance(raw, dict):
            raise ConfigError("threshold config must be a JSON object")
        smells = raw.get("smells", {})
        if not isinstance(smells, dict):
            raise ConfigError("'smells' must be an object")
        exponent = raw.get("ac-exponent", AC_LITERAL)
        if exponent not in (AC_LITERAL, "quadratic"):
            raise ConfigError(f"unknown ac-exponent {exponent!r}")
        return cls(smells, exponent)

    def threshold(self, smell: str, key: str):
        return self.thresholds[smell][key]


def _detectable_zones(corpus: Corpus, cuts: CutIndex) -> list[DomainName]:
    """Zones worth inspecting: cuts with at least one known NS target."""
    return [cut for cut in cuts.cuts if cuts.delegation(cut).targets]


def detect_cyclic_dependency(corpus: Corpus, graph: DependencyGraph,
                             config: CatalogueConfig,
                             cuts: CutIndex) -> list[Finding]:
    definition = CATALOGUE[CYCLIC_DEPENDENCY]
    findings = []
    for cycle in find_dependency_cycles(graph):
        witnesses = [w for w in cycle.witnesses if w is not None]
        # Anchor the finding at the zone whose delegation lacks the glue.
        anchor_zone = cycle.zones[0]
        for i, witness in enumerate(cycle.witnesses):
            if witness is not None:
                anchor_zone = cycle.zones[i]
                break
        locations = [node_id(NodeKind.ZONE, z) for z in cycle.zones]
        locations += [node_id(NodeKind.SERVER, w) for w in witnesses]
        findings.append(Finding(
            definition.id,
            anchor_zone,
            definition.severity,
            tuple(locations),
            {"cycle": list(cycle.zones),
             "missingGlue": witnesses},
            definition.impacts,
            definition.refactorings))
    return findings


def detect_false_redundancy(corpus: Corpus, graph: DependencyGraph,
                            config: CatalogueConfig,
                            cuts: CutIndex) -> list[Finding]:
    definition = CATALOGUE[FALSE_REDUNDANCY]
    dimensions = (("geographic", "locations", "minLocations", "GeographicRedundancy"),
                  ("network", "asns", "minAsns", "NetworkRedundancy"),
                  ("prefix", "prefixes", "minPrefixes", "PrefixRedundancy"))
    findings = []
    for zone in _detectable_zones(corpus, cuts):
        results = {m.name: m for m in server_redundancy(corpus, zone, cuts)}
        server_count = int(results["ServerRedundancy"].value)
        if server_count < 2:
            continue  # one server is diminished redundancy, not false
        for dimension, plural, threshold_key, metric_name in dimensions:
            threshold = config.threshold(FALSE_REDUNDANCY, threshold_key)
            metric = results[metric_name]
            if metric.value < threshold:
                groups = metric.breakdown[plural]
                servers = results["ServerRedundancy"].breakdown["servers"]
                findings.append(Finding(
                    definition.id, str(zone), definition.severity,
                    tuple(node_id(NodeKind.SERVER, s) for s in servers),
                    {"dimension": dimension,
                     "distinct": int(metric.value),
                     "threshold": threshold,
                     "groups": groups,
                     "serverCount": server_count},
                    definition.impacts, definition.refactorings))
    return findings


def detect_diminished_redundancy(corpus: Corpus, graph: DependencyGraph,
                                 config: CatalogueConfig,
                                 cuts: CutIndex) -> list[Finding]:
    definition = CATALOGUE[DIMINISHED_REDUNDANCY]
    minimum = config.threshold(DIMINISHED_REDUNDANCY, "minServers")
    findings = []
    for zone in _detectable_zones(corpus, cuts):
        targets = cuts.delegation(zone).targets
        names = sorted({str(t) for t in targets})
        evidence = None
        if len(names) < minimum:
            evidence = {"serverCount": len(names), "threshold": minimum,
                        "servers": names}
        else:
            addresses: set[str] = set()
            known = True
            for target in targets:
                published = set(cuts.addresses_anywhere(target))
                server = corpus.server(target)
                if server is not None:
                    published |= set(server.addresses)
                if not published:
                    known = False
                addresses |= published
            if known and len(addresses) < minimum:
                evidence = {"serverCount": len(names),
                            "distinctAddresses": len(addresses),
                            "threshold": minimum, "servers": names}
        if evidence is not None:
            findings.append(Finding(
                definition.id, str(zone), definition.severity,
                tuple(node_id(NodeKind.SERVER, n) for n in names),
                evidence, definition.impacts, definition.refactorings))
    return findings


def detect_excessive_zone_influence(corpus: Corpus, graph: DependencyGraph,
                                    config: CatalogueConfig,
                                    cuts: CutIndex) -> list[Finding]:
    definition = CATALOGUE[EXCESSIVE_ZONE_INFLUENCE]
    bound = config.threshold(EXCESSIVE_ZONE_INFLUENCE, "maxInfluence")
    findings = []
    for zone in _detectable_zones(corpus, cuts):
        closure = zone_dependency_closure(graph, str(zone))
        if len(closure) > bound:
            findings.append(Finding(
                definition.id, str(zone), definition.severity,
                tuple(node_id(NodeKind.ZONE, z) for z in sorted(closure)),
                {"influence": len(closure), "threshold": bound,
                 "zones": sorted(closure)},
                definition.impacts, definition.refactorings))
    return findings


def detect_high_administrative_complexity(corpus: Corpus, graph: DependencyGraph,
                                          config: CatalogueConfig,
                                          cuts: CutIndex) -> list[Finding]:
    definition = CATALOGUE[HIGH_ADMINISTRATIVE_COMPLEXITY]
    bound = config.threshold(HIGH_ADMINISTRATIVE_COMPLEXITY, "maxAc")
    findings = []
    for zone in _detectable_zones(corpus, cuts):
        metric = administrative_complexity(corpus, zone, cuts,
                                           exponent=config.ac_exponent)
        if metric.value > bound:
            findings.append(Finding(
                definition.id, str(zone), definition.severity,
                tuple(node_id(NodeKind.ORGANIZATION, org)
                      for org in metric.breakdown["organizations"]),
                {"ac": metric.value, "threshold": bound,
                 "organizations": metric.breakdown["organizations"],
                 "confidence": metric.confidence},
                definition.impacts, definition.refactorings))
    return findings


DETECTORS = {
    CYCLIC_DEPENDENCY: detect_cyclic_dependency,
    FALSE_REDUNDANCY: detect_false_redundancy,
    DIMINISHED_REDUNDANCY: detect_diminished_redundancy,
    EXCESSIVE_ZONE_INFLUENCE: detect_excessive_zone_influence,
    HIGH_ADMINISTRATIVE_COMPLEXITY: detect_high_administrative_complexity,
}


def run_catalogue(corpus: Corpus, graph: DependencyGraph | None = None,
                  config: CatalogueConfig | None = None,
                  cuts: CutIndex | None = None) -> list[Finding]:
    """Run every detector and return findings sorted by (zone, smell)."""
    from .graph import build_graph
    if cuts is None:
        cuts = CutIndex(corpus)
    if graph is None:
        graph = build_graph(corpus, cuts)
    if config is None:
        config = CatalogueConfig()
    findings: list[Finding] = []
    for smell_id in sorted(DETECTORS):
        findings.extend(DETECTORS[smell_id](corpus, graph, config, cuts))
    findings.sort(key=lambda f: (f.zone, f.smell,
                                 f.evidence.get("dimension", ""),
                                 sorted(f.evidence.get("missingGlue", []))))
    return findings


def findings_to_json(findings: list[Finding]) -> dict:
    return {"findings": [f.to_json() for f in findings]}
