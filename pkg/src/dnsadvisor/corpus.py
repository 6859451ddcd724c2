"""Corpus loading (zone files + deployment metadata) and the cut index.

The cut index is the derived view of a corpus used by the resolver, the
graph builder and the refactoring engine: which zone cuts exist, where each
cut is delegated, which servers serve it and what glue is published for them.
"""

from __future__ import annotations

import glob as globmod
import json
from dataclasses import dataclass, field
from pathlib import Path

from .model import (ADDRESS_TYPES, Corpus, ModelError, Organization,
                    RecordType, ResourceRecord, Server, Zone)
from .names import ROOT, DomainName, NameError_
from .zonefile import ZoneFileError, parse_zone_file


class CorpusError(ValueError):
    """Raised for malformed metadata or inconsistent corpus inputs."""


_SERVER_FIELDS = {"name", "addresses", "location", "asn", "prefix", "org"}


def _parse_metadata(raw: dict, source: str) -> tuple[list[Server], list[Organization]]:
    if not isinstance(raw, dict):
        raise CorpusError(f"{source}: metadata must be a JSON object")
    servers: list[Server] = []
    for i, entry in enumerate(raw.get("servers", [])):
        if not isinstance(entry, dict) or not _SERVER_FIELDS <= set(entry):
            missing = sorted(_SERVER_FIELDS - set(entry or {}))
            raise CorpusError(f"{source}: servers[{i}] missing fields {missing}")
        try:
            name = DomainName.parse(str(entry["name"]))
        except NameError_ as exc:
            raise CorpusError(f"{source}: servers[{i}]: {exc}") from exc
        addresses = entry["addresses"]
        if not isinstance(addresses, list) or not all(isinstance(a, str) for a in addresses):
            raise CorpusError(f"{source}: servers[{i}].addresses must be a string list")
        servers.append(Server(name, tuple(addresses), str(entry["location"]),
                              str(entry["asn"]), str(entry["prefix"]),
                              str(entry["org"])))
    organizations: list[Organization] = []
    for i, entry in enumerate(raw.get("organizations", [])):
        if not isinstance(entry, dict) or "id" not in entry or "name" not in entry:
            raise CorpusError(f"{source}: organizations[{i}] needs id and name")
        organizations.append(Organization(str(entry["id"]), str(entry["name"])))
    return servers, organizations


def load_corpus(zone_paths, metadata_path=None, *,
                anchor: DomainName | str = ROOT) -> Corpus:
    """Build a Corpus from zone file paths/globs and a metadata JSON path.

    NS targets absent from metadata become synthetic Server entries with
    per-server placeholder tokens so they never fabricate shared
    infrastructure. Duplicate origins and malformed metadata raise.
    """
    if isinstance(anchor, str):
        anchor = DomainName.parse(anchor)

    paths: list[Path] = []
    for pattern in zone_paths:
        pattern = str(pattern)
        matches = sorted(globmod.glob(pattern))
        if matches:
            paths.extend(Path(m) for m in matches)
        else:
            paths.append(Path(pattern))

    if not paths:
        raise CorpusError("corpus requires at least one zone")
    zones: list[Zone] = []
    for path in paths:
        if not path.is_file():
            raise CorpusError(f"zone file not found: {path}")
        zones.append(parse_zone_file(path.read_text(), source=str(path)))
    zones.sort(key=lambda z: str(z.origin))

    servers: list[Server] = []
    organizations: list[Organization] = []
    if metadata_path is not None:
        meta_path = Path(metadata_path)
        if not meta_path.is_file():
            raise CorpusError(f"metadata file not found: {meta_path}")
        try:
            raw = json.loads(meta_path.read_text())
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{meta_path}: invalid JSON: {exc}") from exc
        servers, organizations = _parse_metadata(raw, str(meta_path))

    return assemble_corpus(zones, servers, organizations, anchor)


def assemble_corpus(zones, servers, organizations,
                    anchor: DomainName = ROOT) -> Corpus:
    """Complete a corpus: synthesize unknown servers, close org references."""
    known = {s.name for s in servers}
    referenced: list[DomainName] = []
    for zone in zones:
        for record in zone.records:
            if record.rtype is RecordType.NS and record.rdata not in referenced:
                referenced.append(record.rdata)

    full_servers = list(servers)
    for name in referenced:
        if name not in known:
            token = f"unknown-metadata:{name}"
            full_servers.append(Server(name, (), token, token, token, token,
                                       synthetic=True))
            known.add(name)

    org_index = {o.id: o for o in organizations}
    for server in full_servers:
        if server.org not in org_index:
            org_index[server.org] = Organization(server.org, server.org)
    full_orgs = [
        Organization(org.id, org.name,
                     tuple(sorted((s.name for s in full_servers if s.org == org.id),
                                  key=str)))
        for org in org_index.values()
    ]
    full_orgs.sort(key=lambda o: o.id)
    full_servers.sort(key=lambda s: str(s.name))

    try:
        return Corpus(tuple(zones), tuple(full_servers), tuple(full_orgs), anchor)
    except ModelError as exc:
        raise CorpusError(str(exc)) from exc


@dataclass(frozen=True)
class Delegation:
    """One zone cut: where it is delegated and through which servers."""

    cut: DomainName
    site: DomainName | None          # origin of the file carrying the NS set
    targets: tuple[DomainName, ...]  # deterministic order, glue-bearing first


@dataclass
class CutIndex:
    """Derived topology of a corpus, computed once per corpus."""

    corpus: Corpus
    cuts: list[DomainName] = field(default_factory=list)
    _file_zones: dict[DomainName, Zone] = field(default_factory=dict)
    _delegations: dict[DomainName, Delegation] = field(default_factory=dict)
    _addresses: dict[DomainName, list[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._file_zones = {z.origin: z for z in self.corpus.zones}
        cut_set: dict[DomainName, None] = {self.corpus.root_origin: None}
        for zone in self.corpus.zones:
            cut_set[zone.origin] = None
            for owner in zone.delegations():
                cut_set[owner] = None
        self.cuts = sorted(cut_set, key=lambda n: (len(n.labels), str(n)))
        for zone in self.corpus.zones:
            for record in zone.records:
                if record.rtype in ADDRESS_TYPES:
                    self._addresses.setdefault(record.owner, []).append(record.rdata)
        for cut in self.cuts:
            self._delegations[cut] = self._build_delegation(cut)

    def _build_delegation(self, cut: DomainName) -> Delegation:
        zone = self._file_zones.get(cut)
        targets: list[DomainName] = []
        site: DomainName | None = None
        parent = self.enclosing_file_zone(cut, proper=True)
        if parent is not None and cut in parent.delegations():
            site = parent.origin
            targets.extend(parent.delegations()[cut])
        if zone is not None:
            if site is None:
                site = zone.origin  # apex NS with bootstrap glue in own file
            for target in zone.apex_ns_targets():
                if target not in targets:
                    targets.append(target)
        glued = sorted((t for t in targets if self.glue_for(cut, t)), key=str)
        bare = sorted((t for t in targets if not self.glue_for(cut, t)), key=str)
        return Delegation(cut, site, tuple(glued + bare))

    def enclosing_file_zone(self, name: DomainName, *, proper: bool = False) -> Zone | None:
        """The deepest corpus zone file whose origin contains `name`."""
        best: Zone | None = None
        for zone in self.corpus.zones:
            if proper and zone.origin == name:
                continue
            if name.is_subdomain_of(zone.origin):
                if best is None or len(zone.origin.labels) > len(best.origin.labels):
                    best = zone
        return best

    def home_cut(self, name: DomainName) -> DomainName:
        """The deepest known cut at or above `name`."""
        best = self.corpus.root_origin
        for cut in self.cuts:
            if name.is_subdomain_of(cut) and len(cut.labels) >= len(best.labels):
                best = cut
        return best

    def delegation(self, cut: DomainName) -> Delegation:
        return self._delegations[cut]

    def file_zone(self, origin: DomainName) -> Zone | None:
        return self._file_zones.get(origin)

    def glue_for(self, cut: DomainName, target: DomainName) -> list[str]:
        """Address records for `target` published in the file delegating `cut`."""
        delegation = self._delegations.get(cut)
        site = delegation.site if delegation else None
        if site is None:
            parent = self.enclosing_file_zone(cut, proper=True)
            if parent is not None and cut in parent.delegations():
                site = parent.origin
            elif cut in self._file_zones:
                site = cut
        if site is None:
            return []
        zone = self._file_zones[site]
        return [r.rdata for r in zone.records
                if r.rtype in ADDRESS_TYPES and r.owner == target]

    def addresses_anywhere(self, name: DomainName) -> list[str]:
        """Every zone-file address published for `name`, any file."""
        return list(self._addresses.get(name, []))

    def records_under(self, cut: DomainName) -> list[ResourceRecord]:
        """The cut's virtual data: corpus-wide records owned at or below it."""
        out: list[ResourceRecord] = []
        for zone in self.corpus.zones:
            for record in zone.records:
                if record.owner.is_subdomain_of(cut):
                    out.append(record)
        return out

    def child_cuts(self, cut: DomainName) -> list[DomainName]:
        return [c for c in self.cuts if c.is_proper_subdomain_of(cut)]

    def next_cut_towards(self, current: DomainName, name: DomainName) -> DomainName | None:
        """The shallowest cut strictly below `current` on the way to `name`."""
        best: DomainName | None = None
        for cut in self.cuts:
            if not cut.is_proper_subdomain_of(current):
                continue
            if not name.is_subdomain_of(cut):
                continue
            if best is None or len(cut.labels) < len(best.labels):
                best = cut
        return best

    def glue_sites_for(self, name: DomainName) -> list[Zone]:
        """Files that both reference `name` as an NS target and publish its address."""
        sites = []
        for zone in self.corpus.zones:
            refers = any(r.rtype is RecordType.NS and r.rdata == name
                         for r in zone.records)
            publishes = any(r.rtype in ADDRESS_TYPES and r.owner == name
                            for r in zone.records)
            if refers and publishes:
                sites.append(zone)
        return sites
