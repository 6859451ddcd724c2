"""HTTP service for interactive analysis and what-if refactoring.

Sessions fork the base corpus; previews are pure, applies are serialized per
session and replayable from the recorded history. With a persist directory
every session is snapshotted to one JSON file and reloaded on startup.
"""

from __future__ import annotations

import difflib
import importlib.metadata
import json
import threading
import uuid
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .corpus import CutIndex, assemble_corpus
from .graph import DependencyGraph, build_graph, export_graph
from .metrics import (administrative_complexity, server_redundancy,
                      zone_influence)
from .model import ADDRESS_TYPES, Corpus, Organization, Server
from .names import DomainName, NameError_
from .refactor import (RULES, RefactoringError, apply_rule, check_preservation,
                       match_rule)
from .resolver import resolve
from .smells import CatalogueConfig, findings_to_json, run_catalogue
from .zonefile import parse_zone_file, serialize_zone


def _version() -> str:
    try:
        return importlib.metadata.version("dnsadvisor")
    except importlib.metadata.PackageNotFoundError:
        return "0.0.0"


class PreviewRequest(BaseModel):
    rule: str
    matchIndex: int = 0
    params: dict = Field(default_factory=dict)


class ApplyRequest(PreviewRequest):
    historyLength: int | None = None


class SimulateRequest(BaseModel):
    failedServers: list[str] = Field(default_factory=list)
    names: list[str] = Field(default_factory=list)


@dataclass
class Session:
    id: str
    base: Corpus
    working: Corpus
    config: CatalogueConfig
    history: list[dict] = dc_field(default_factory=list)
    lock: threading.Lock = dc_field(default_factory=threading.Lock)


def _analyze(corpus: Corpus, config: CatalogueConfig):
    cuts = CutIndex(corpus)
    graph = build_graph(corpus, cuts)
    findings = run_catalogue(corpus, graph, config, cuts)
    return cuts, graph, findings


def _findings_delta(before, after) -> dict:
    return {"removed": [f.to_json() for f in before if f not in after],
            "introduced": [f.to_json() for f in after if f not in before]}


def _zone_diffs(before: Corpus, after: Corpus) -> dict[str, str]:
    diffs: dict[str, str] = {}
    origins = {z.origin for z in before.zones} | {z.origin for z in after.zones}
    for origin in sorted(origins, key=str):
        old = before.zone(origin)
        new = after.zone(origin)
        old_text = serialize_zone(old) if old is not None else ""
        new_text = serialize_zone(new) if new is not None else ""
        if old_text == new_text:
            continue
        diff = difflib.unified_diff(
            old_text.splitlines(keepends=True),
            new_text.splitlines(keepends=True),
            fromfile=f"base/{origin}", tofile=f"working/{origin}")
        diffs[str(origin)] = "".join(diff)
    return diffs


def _preview(session: Session, request: PreviewRequest) -> tuple[dict, Corpus]:
    """Compute one rule application on the working corpus without mutating."""
    if request.rule not in RULES:
        raise HTTPException(400, f"unknown rule id {request.rule!r}")
    corpus = session.working
    cuts, graph, findings = _analyze(corpus, session.config)
    matches = match_rule(corpus, graph, request.rule, session.config,
                         findings, cuts)
    if not matches:
        raise HTTPException(400, f"rule {request.rule} has no matches")
    if not 0 <= request.matchIndex < len(matches):
        raise HTTPException(
            400, f"matchIndex {request.matchIndex} out of range "
                 f"(rule has {len(matches)} matches)")
    match = matches[request.matchIndex]
    try:
        candidate = apply_rule(corpus, match, request.params)
    except RefactoringError as exc:
        raise HTTPException(400, str(exc))
    preservation = check_preservation(corpus, candidate)
    after_findings = _analyze(candidate, session.config)[2]
    body = {
        "rule": request.rule,
        "match": match.to_json(),
        "matchCount": len(matches),
        "findingsDelta": _findings_delta(findings, after_findings),
        "preservation": preservation.to_json(),
        "diffs": _zone_diffs(session.base, candidate),
        "historyLength": len(session.history),
    }
    return body, candidate


def replay(base: Corpus, config: CatalogueConfig, history: list[dict]) -> Corpus:
    """Rebuild a working corpus by re-applying a session's history."""
    corpus = base
    for entry in history:
        cuts, graph, findings = _analyze(corpus, config)
        matches = match_rule(corpus, graph, entry["rule"], config,
                             findings, cuts)
        corpus = apply_rule(corpus, matches[entry["matchIndex"]],
                            entry.get("params", {}))
    return corpus


def _corpus_snapshot(corpus: Corpus) -> dict:
    """Source form of a corpus: zone texts plus the metadata document.

    Synthetic servers are omitted; corpus assembly recreates them.
    """
    return {
        "anchor": str(corpus.root_origin),
        "zones": {str(z.origin): serialize_zone(z) for z in corpus.zones},
        "metadata": {
            "servers": [
                {"name": str(s.name), "addresses": list(s.addresses),
                 "location": s.location, "asn": s.asn, "prefix": s.prefix,
                 "org": s.org}
                for s in corpus.servers if not s.synthetic],
            "organizations": [{"id": o.id, "name": o.name}
                              for o in corpus.organizations],
        },
    }


def _corpus_from_snapshot(doc: dict) -> Corpus:
    anchor = DomainName.parse(doc["anchor"])
    zones = [parse_zone_file(text, source=f"session:{origin}")
             for origin, text in sorted(doc["zones"].items())]
    servers = [Server(DomainName.parse(s["name"]), tuple(s["addresses"]),
                      s["location"], s["asn"], s["prefix"], s["org"])
               for s in doc["metadata"]["servers"]]
    organizations = [Organization(o["id"], o["name"])
                     for o in doc["metadata"]["organizations"]]
    return assemble_corpus(zones, servers, organizations, anchor)


class SessionStore:
    def __init__(self, base: Corpus, config: CatalogueConfig,
                 persist_dir: str | Path | None = None):
        self.base = base
        self.config = config
        self.persist_dir = Path(persist_dir) if persist_dir else None
        self.sessions: dict[str, Session] = {}
        self.registry_lock = threading.Lock()
        if self.persist_dir is not None:
            self.persist_dir.mkdir(parents=True, exist_ok=True)
            self._load_snapshots()

    def _load_snapshots(self) -> None:
        assert self.persist_dir is not None
        for path in sorted(self.persist_dir.glob("*.json")):
            doc = json.loads(path.read_text(encoding="utf-8"))
            base = _corpus_from_snapshot(doc["base"])
            session = Session(doc["id"], base,
                              replay(base, self.config, doc["history"]),
                              self.config, list(doc["history"]))
            self.sessions[session.id] = session

    def _snapshot(self, session: Session) -> None:
        if self.persist_dir is None:
            return
        doc = {"id": session.id, "base": _corpus_snapshot(session.base),
               "history": session.history}
        path = self.persist_dir / f"{session.id}.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")

    def create(self) -> Session:
        session = Session(uuid.uuid4().hex[:12], self.base, self.base,
                          self.config)
        with self.registry_lock:
            self.sessions[session.id] = session
        self._snapshot(session)
        return session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return session

    def delete(self, session_id: str) -> None:
        with self.registry_lock:
            if session_id not in self.sessions:
                raise HTTPException(404, f"unknown session {session_id!r}")
            del self.sessions[session_id]
        if self.persist_dir is not None:
            path = self.persist_dir / f"{session_id}.json"
            if path.exists():
                path.unlink()


def create_app(base: Corpus, config: CatalogueConfig | None = None,
               persist_dir: str | Path | None = None) -> FastAPI:
    if config is None:
        config = CatalogueConfig()
    store = SessionStore(base, config, persist_dir)
    app = FastAPI(title="dns-advisor", version=_version())
    app.state.store = store
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    def parse_origin(origin: str) -> DomainName:
        try:
            return DomainName.parse(origin if origin.endswith(".")
                                    else origin + ".")
        except NameError_ as exc:
            raise HTTPException(400, str(exc))

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "service": "dns-advisor",
                "version": _version(), "sessions": len(store.sessions)}

    @app.post("/sessions", status_code=201)
    def create_session() -> dict:
        session = store.create()
        return {"id": session.id, "historyLength": 0}

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> Response:
        store.delete(session_id)
        return Response(status_code=204)

    @app.get("/sessions/{session_id}/graph")
    def session_graph(session_id: str) -> dict:
        session = store.get(session_id)
        _, graph, _ = _analyze(session.working, session.config)
        return export_graph(graph)

    @app.get("/sessions/{session_id}/findings")
    def session_findings(session_id: str) -> dict:
        session = store.get(session_id)
        findings = _analyze(session.working, session.config)[2]
        return findings_to_json(findings)

    @app.get("/sessions/{session_id}/metrics/{zone}")
    def session_metrics(session_id: str, zone: str) -> dict:
        session = store.get(session_id)
        origin = parse_origin(zone)
        corpus = session.working
        cuts = CutIndex(corpus)
        if origin not in cuts.cuts or not cuts.delegation(origin).targets:
            raise HTTPException(404, f"no zone {origin} with name servers")
        graph = build_graph(corpus, cuts)
        entries = [administrative_complexity(corpus, origin, cuts,
                                             session.config.ac_exponent)]
        entries.extend(server_redundancy(corpus, origin, cuts))
        entries.append(zone_influence(graph, str(origin)))
        return {"zone": str(origin),
                "metrics": [entry.to_json() for entry in entries]}

    @app.post("/sessions/{session_id}/refactor/preview")
    def refactor_preview(session_id: str, request: PreviewRequest) -> dict:
        session = store.get(session_id)
        body, _ = _preview(session, request)
        return body

    @app.post("/sessions/{session_id}/refactor/apply")
    def refactor_apply(session_id: str, request: ApplyRequest) -> dict:
        session = store.get(session_id)
        with session.lock:
            if request.historyLength is not None and \
                    request.historyLength != len(session.history):
                raise HTTPException(
                    409, f"session history moved to {len(session.history)} "
                         f"entries since the preview at {request.historyLength}")
            body, candidate = _preview(session, request)
            if body["preservation"]["verdict"] != "Preserved":
                raise HTTPException(400, "refactoring would change existing "
                                         "resolution answers; not applied")
            session.working = candidate
            session.history.append({"rule": request.rule,
                                    "matchIndex": request.matchIndex,
                                    "params": request.params})
            store._snapshot(session)
            body["historyLength"] = len(session.history)
            return body

    @app.post("/sessions/{session_id}/failures/simulate")
    def simulate_failures(session_id: str, request: SimulateRequest) -> dict:
        session = store.get(session_id)
        corpus = session.working
        cuts = CutIndex(corpus)
        names = list(request.names)
        if not names:
            owners = {str(r.owner) for z in corpus.zones for r in z.records
                      if r.rtype in ADDRESS_TYPES}
            names = sorted(owners)
        results = []
        for name in names:
            try:
                outcome = resolve(corpus, name,
                                  failed_servers=request.failedServers,
                                  cuts=cuts)
            except NameError_ as exc:
                raise HTTPException(400, str(exc))
            results.append(outcome.to_json())
        return {"results": results}

    @app.get("/sessions/{session_id}/zones/{origin}/file",
             response_class=PlainTextResponse)
    def zone_file(session_id: str, origin: str) -> str:
        session = store.get(session_id)
        zone = session.working.zone(parse_origin(origin))
        if zone is None:
            raise HTTPException(404, f"no zone file with origin {origin!r}")
        return serialize_zone(zone)

    @app.get("/sessions/{session_id}/zones/{origin}/diff",
             response_class=PlainTextResponse)
    def zone_diff(session_id: str, origin: str) -> str:
        session = store.get(session_id)
        name = parse_origin(origin)
        base = session.base.zone(name)
        working = session.working.zone(name)
        if base is None and working is None:
            raise HTTPException(404, f"no zone file with origin {origin!r}")
        diffs = _zone_diffs(session.base, session.working)
        return diffs.get(str(name), "")

    return app
