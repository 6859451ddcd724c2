"""Core data model: resource records, zones, servers, organizations, corpus."""

from __future__ import annotations

import enum
import ipaddress
from dataclasses import dataclass, field

from .names import ROOT, DomainName


class ModelError(ValueError):
    """Raised when a zone or corpus violates a structural invariant."""


class RecordType(enum.Enum):
    SOA = "SOA"
    NS = "NS"
    A = "A"
    AAAA = "AAAA"
    CNAME = "CNAME"


ADDRESS_TYPES = (RecordType.A, RecordType.AAAA)


@dataclass(frozen=True)
class SoaData:
    """SOA rdata fields in master-file order."""

    mname: DomainName
    rname: DomainName
    serial: int
    refresh: int
    retry: int
    expire: int
    minimum: int

    def to_text(self) -> str:
        return (f"{self.mname} {self.rname} {self.serial} {self.refresh} "
                f"{self.retry} {self.expire} {self.minimum}")


@dataclass(frozen=True)
class ResourceRecord:
    """One record: owner, optional TTL, class, type and typed rdata.

    rdata is a DomainName for NS/CNAME, an address string for A/AAAA and a
    SoaData for SOA.
    """

    owner: DomainName
    ttl: int | None
    rclass: str
    rtype: RecordType
    rdata: DomainName | str | SoaData

    def __post_init__(self) -> None:
        if self.rclass != "IN":
            raise ModelError(f"unsupported class {self.rclass!r}")
        if self.rtype in (RecordType.NS, RecordType.CNAME):
            if not isinstance(self.rdata, DomainName):
                raise ModelError(f"{self.rtype.value} rdata must be a name")
        elif self.rtype is RecordType.SOA:
            if not isinstance(self.rdata, SoaData):
                raise ModelError("SOA rdata must be SoaData")
        elif self.rtype is RecordType.A:
            if not isinstance(self.rdata, str):
                raise ModelError("A rdata must be an address string")
            try:
                ipaddress.IPv4Address(self.rdata)
            except ValueError as exc:
                raise ModelError(f"bad IPv4 address {self.rdata!r}") from exc
        elif self.rtype is RecordType.AAAA:
            if not isinstance(self.rdata, str):
                raise ModelError("AAAA rdata must be an address string")
            try:
                ipaddress.IPv6Address(self.rdata)
            except ValueError as exc:
                raise ModelError(f"bad IPv6 address {self.rdata!r}") from exc

    def rdata_text(self) -> str:
        if isinstance(self.rdata, (DomainName, SoaData)):
            return str(self.rdata) if isinstance(self.rdata, DomainName) else self.rdata.to_text()
        return self.rdata


@dataclass(frozen=True)
class Zone:
    """A zone file's content: origin plus records in stored order.

    Address records whose owner lies outside the origin are accepted when the
    owner is also an NS target somewhere in the zone (cross-zone glue, the
    form delegation repair produces); anything else out of origin is an error.
    """

    origin: DomainName
    records: tuple[ResourceRecord, ...]
    default_ttl: int | None = None
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        ns_targets = {r.rdata for r in self.records if r.rtype is RecordType.NS}
        for record in self.records:
            if record.owner.is_subdomain_of(self.origin):
                continue
            if record.rtype in ADDRESS_TYPES and record.owner in ns_targets:
                continue
            raise ModelError(
                f"owner {record.owner} outside origin {self.origin}")
        if not any(r.rtype is RecordType.NS and r.owner == self.origin
                   for r in self.records):
            raise ModelError(f"zone {self.origin} has no NS record at its origin")
        by_owner: dict[DomainName, set[RecordType]] = {}
        for record in self.records:
            by_owner.setdefault(record.owner, set()).add(record.rtype)
        for owner, types in by_owner.items():
            if RecordType.CNAME in types and len(types) > 1:
                raise ModelError(f"{owner} has a CNAME alongside other records")

    @property
    def parent_origin(self) -> DomainName:
        if self.origin.is_root:
            raise ModelError("the root zone has no parent origin")
        return self.origin.parent()

    def with_records(self, records: tuple[ResourceRecord, ...]) -> "Zone":
        return Zone(self.origin, records, self.default_ttl, self.warnings)

    def apex_ns_targets(self) -> list[DomainName]:
        seen: list[DomainName] = []
        for record in self.records:
            if record.rtype is RecordType.NS and record.owner == self.origin:
                if record.rdata not in seen:
                    seen.append(record.rdata)
        return seen

    def delegations(self) -> dict[DomainName, list[DomainName]]:
        """NS sets keyed by delegated owner, apex excluded, record order kept."""
        out: dict[DomainName, list[DomainName]] = {}
        for record in self.records:
            if record.rtype is RecordType.NS and record.owner != self.origin:
                targets = out.setdefault(record.owner, [])
                if record.rdata not in targets:
                    targets.append(record.rdata)
        return out


@dataclass(frozen=True)
class Server:
    """An authoritative name server with its deployment metadata.

    location, asn and prefix are opaque equality-compared tokens. Servers
    synthesized for NS targets missing from metadata are flagged and carry
    per-server placeholder tokens.
    """

    name: DomainName
    addresses: tuple[str, ...]
    location: str
    asn: str
    prefix: str
    org: str
    synthetic: bool = False


@dataclass(frozen=True)
class Organization:
    id: str
    name: str
    servers: tuple[DomainName, ...] = ()


@dataclass(frozen=True)
class Corpus:
    """All zones plus deployment metadata under one top anchor.

    The anchor is the zone resolution starts from; when no zone file with
    that origin exists it is treated as a synthetic hints layer.
    """

    zones: tuple[Zone, ...]
    servers: tuple[Server, ...]
    organizations: tuple[Organization, ...]
    root_origin: DomainName = ROOT

    def __post_init__(self) -> None:
        seen: set[DomainName] = set()
        for zone in self.zones:
            if zone.origin in seen:
                raise ModelError(f"duplicate zone origin {zone.origin}")
            seen.add(zone.origin)
            if not zone.origin.is_subdomain_of(self.root_origin):
                raise ModelError(
                    f"zone {zone.origin} is outside the top anchor {self.root_origin}")
        server_orgs = {s.org for s in self.servers}
        org_ids = {o.id for o in self.organizations}
        if not server_orgs <= org_ids:
            missing = sorted(server_orgs - org_ids)
            raise ModelError(f"servers reference unknown organizations: {missing}")
        by_name = {}
        for server in self.servers:
            if server.name in by_name:
                raise ModelError(f"duplicate server {server.name}")
            by_name[server.name] = server
        for org in self.organizations:
            for name in org.servers:
                if name not in by_name or by_name[name].org != org.id:
                    raise ModelError(
                        f"organization {org.id} lists {name} inconsistently")

    def zone(self, origin: DomainName) -> Zone | None:
        for zone in self.zones:
            if zone.origin == origin:
                return zone
        return None

    def server(self, name: DomainName) -> Server | None:
        for server in self.servers:
            if server.name == name:
                return server
        return None

    def organization(self, org_id: str) -> Organization | None:
        for org in self.organizations:
            if org.id == org_id:
                return org
        return None


class Bailiwick(enum.Enum):
    IN_BAILIWICK = "InBailiwick"
    OUT_OF_BAILIWICK = "OutOfBailiwick"


def classify_bailiwick(zone: Zone, ns_target: DomainName) -> Bailiwick:
    """Classify an NS target of `zone` against the name it serves.

    The target is in bailiwick when it sits at or below the owner of an NS
    record carrying it (the delegated name), out of bailiwick otherwise.
    """
    owners = [r.owner for r in zone.records
              if r.rtype is RecordType.NS and r.rdata == ns_target]
    if not owners:
        raise ModelError(f"{ns_target} is not an NS target in zone {zone.origin}")
    for owner in owners:
        if ns_target.is_subdomain_of(owner):
            return Bailiwick.IN_BAILIWICK
    return Bailiwick.OUT_OF_BAILIWICK
