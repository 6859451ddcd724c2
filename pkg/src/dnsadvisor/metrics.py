"""Zone metrics: administrative complexity, redundancy counts, influence."""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import CutIndex
from .graph import DependencyGraph, zone_dependency_closure
from .model import Corpus
from .names import DomainName

AC_LITERAL = "literal"
AC_QUADRATIC = "quadratic"


@dataclass(frozen=True)
class MetricResult:
    name: str
    zone: str
    value: float
    breakdown: dict
    confidence: str  # "full" when every input was known, else "partial"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "breakdown": self.breakdown,
            "confidence": self.confidence,
        }


def _zone_servers(corpus: Corpus, cuts: CutIndex, zone: DomainName):
    targets = cuts.delegation(zone).targets
    servers = []
    for target in sorted(targets, key=str):
        server = corpus.server(target)
        servers.append((target, server))
    return servers


def administrative_complexity(corpus: Corpus, zone: DomainName | str,
                              cuts: CutIndex | None = None,
                              exponent: str = AC_LITERAL) -> MetricResult:
    """1 minus the sum over organizations of (share of NS)^n.

    n is the zone's NS count; with `exponent` set to "quadratic" the power
    is fixed at 2 instead of n. A single organization scores 0; maximal
    fragmentation approaches 1.
    """
    if isinstance(zone, str):
        zone = DomainName.parse(zone)
    if cuts is None:
        cuts = CutIndex(corpus)
    servers = _zone_servers(corpus, cuts, zone)
    if not servers:
        raise ValueError(f"zone {zone} has no authoritative servers")
    confidence = "full"
    counts: dict[str, int] = {}
    for target, server in servers:
        if server is None or server.synthetic:
            confidence = "partial"
        org = server.org if server is not None else f"unknown-metadata:{target}"
        counts[org] = counts.get(org, 0) + 1
    n = len(servers)
    power = n if exponent == AC_LITERAL else 2
    value = 1.0 - sum((count / n) ** power for count in counts.values())
    return MetricResult("AdministrativeComplexity", str(zone), value,
                        {"organizations": dict(sorted(counts.items())),
                         "servers": n, "exponent": power},
                        confidence)


def server_redundancy(corpus: Corpus, zone: DomainName | str,
                      cuts: CutIndex | None = None) -> list[MetricResult]:
    """Distinct server, location, network and prefix counts for a zone."""
    if isinstance(zone, str):
        zone = DomainName.parse(zone)
    if cuts is None:
        cuts = CutIndex(corpus)
    servers = _zone_servers(corpus, cuts, zone)
    confidence = "full" if all(
        s is not None and not s.synthetic for _, s in servers) else "partial"

    def tally(attr: str) -> dict[str, int]:
        counts: dict[str, int] = {}
        for target, server in servers:
            token = getattr(server, attr) if server is not None \
                else f"unknown-metadata:{target}"
            counts[token] = counts.get(token, 0) + 1
        return dict(sorted(counts.items()))

    zone_text = str(zone)
    names = sorted({str(t) for t, _ in servers})
    results = [MetricResult("ServerRedundancy", zone_text, float(len(names)),
                            {"servers": names}, confidence)]
    for metric, attr, plural in (("GeographicRedundancy", "location", "locations"),
                                 ("NetworkRedundancy", "asn", "asns"),
                                 ("PrefixRedundancy", "prefix", "prefixes")):
        counts = tally(attr)
        results.append(MetricResult(metric, zone_text, float(len(counts)),
                                    {plural: counts}, confidence))
    return results


def zone_influence(graph: DependencyGraph, zone: DomainName | str) -> MetricResult:
    """How many zones can affect resolution under `zone` (closure size)."""
    closure = zone_dependency_closure(graph, str(zone))
    return MetricResult("ZoneInfluence", str(zone), float(len(closure)),
                        {"zones": sorted(closure)}, "full")
