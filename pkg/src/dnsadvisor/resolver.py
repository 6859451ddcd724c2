"""Simulated iterative resolution over a corpus.

The model walks zone cuts from the top anchor exactly as a hardened
iterative resolver would: referrals take precedence over data below a cut,
referral glue is only a means of contacting servers, out-of-bailiwick NS
names are resolved recursively, and failed servers never answer. Two
desk-scale conventions close the gap left by fileless delegated cuts:

- a contacted server answers from the cut's virtual data (every corpus
  record owned at or below the cut, whichever file carries it);
- when the descent cannot contact the query name's home cut but some file
  both references the name as an NS target and publishes its address, the
  resolver falls back to that glue, confirming it by contacting the named
  server itself (a failed server therefore never resolves this way).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .corpus import CutIndex
from .model import Corpus, RecordType
from .names import DomainName

DEFAULT_BUDGET = 32


class ResolutionStatus(enum.Enum):
    RESOLVED = "Resolved"
    UNRESOLVABLE = "Unresolvable"
    CYCLE_DETECTED = "CycleDetected"
    LOOP_BUDGET_EXCEEDED = "LoopBudgetExceeded"


@dataclass(frozen=True)
class ResolutionOutcome:
    name: DomainName
    qtype: RecordType
    status: ResolutionStatus
    addresses: tuple[str, ...]
    servers_touched: tuple[str, ...]
    zones_touched: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "name": str(self.name),
            "qtype": self.qtype.value,
            "status": self.status.value,
            "addresses": list(self.addresses),
            "serversTouched": list(self.servers_touched),
            "zonesTouched": list(self.zones_touched),
        }


class _BudgetExceeded(Exception):
    pass


_DEAD = object()  # internal marker: branch failed


class _Resolution:
    def __init__(self, cuts: CutIndex, failed: set[DomainName], budget: int):
        self.cuts = cuts
        self.failed = failed
        self.budget = budget
        self.steps = 0
        self.servers_touched: set[DomainName] = set()
        self.zones_touched: set[DomainName] = set()
        self.in_progress: set[tuple[DomainName, RecordType]] = set()

    def step(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise _BudgetExceeded()

    def query(self, name: DomainName, qtype: RecordType,
              alias_seen: tuple[DomainName, ...] = (),
              allow_fallback: bool = True):
        """Returns (status, addresses) or _DEAD for a cycled branch."""
        key = (name, qtype)
        if key in self.in_progress:
            return _DEAD
        self.in_progress.add(key)
        try:
            return self._query(name, qtype, alias_seen, allow_fallback)
        finally:
            self.in_progress.discard(key)

    def _query(self, name, qtype, alias_seen, allow_fallback):
        reached = self._descend(name)
        if reached is not None:
            data = [r for r in self.cuts.records_under(reached)
                    if r.owner == name]
            exact = sorted({r.rdata for r in data if r.rtype is qtype})
            if exact:
                return ResolutionStatus.RESOLVED, tuple(exact)
            aliases = [r.rdata for r in data if r.rtype is RecordType.CNAME]
            if aliases:
                self.step()
                target = aliases[0]
                if target in alias_seen or target == name:
                    return ResolutionStatus.CYCLE_DETECTED, ()
                result = self.query(target, qtype, alias_seen + (name,),
                                    allow_fallback)
                if result is _DEAD:
                    return ResolutionStatus.UNRESOLVABLE, ()
                return result
            return ResolutionStatus.UNRESOLVABLE, ()
        if allow_fallback:
            confirmed = self._glue_fallback(name, qtype)
            if confirmed is not None:
                return ResolutionStatus.RESOLVED, confirmed
        return ResolutionStatus.UNRESOLVABLE, ()

    def _descend(self, name: DomainName) -> DomainName | None:
        """Walk cuts from the anchor to the deepest cut containing `name`.

        Returns that cut when every hop could be contacted, else None.
        """
        anchor = self.cuts.corpus.root_origin
        if not name.is_subdomain_of(anchor):
            return None
        chain = [anchor]
        while True:
            nxt = self.cuts.next_cut_towards(chain[-1], name)
            if nxt is None:
                break
            chain.append(nxt)
        if len(chain) > 1:
            self.zones_touched.add(anchor)
        for cut in chain:
            if cut == anchor and self.cuts.file_zone(anchor) is None:
                continue  # synthetic hints layer, never a contact point
            if not self._contact(cut):
                return None
        return chain[-1]

    def _contact(self, cut: DomainName) -> bool:
        """True when some live server of `cut` is reachable by address."""
        self.step()
        delegation = self.cuts.delegation(cut)
        for target in delegation.targets:
            self.servers_touched.add(target)
            if target in self.failed:
                continue
            addresses = self.cuts.glue_for(cut, target)
            if not addresses:
                sub = self.query(target, RecordType.A, allow_fallback=True)
                if sub is _DEAD or sub[0] is not ResolutionStatus.RESOLVED:
                    continue
                addresses = list(sub[1])
            if addresses:
                self.zones_touched.add(cut)
                return True
        return False

    def _glue_fallback(self, name, qtype):
        if name in self.failed:
            return None
        for zone in sorted(self.cuts.glue_sites_for(name), key=lambda z: str(z.origin)):
            addresses = sorted({r.rdata for r in zone.records
                                if r.owner == name and r.rtype is qtype})
            if not addresses:
                continue
            self.step()
            if self._cut_reachable(zone.origin):
                self.zones_touched.add(zone.origin)
                self.servers_touched.add(name)
                return tuple(addresses)
        return None

    def _cut_reachable(self, origin: DomainName) -> bool:
        anchor = self.cuts.corpus.root_origin
        chain = [anchor]
        current = anchor
        while current != origin:
            nxt = self.cuts.next_cut_towards(current, origin)
            if nxt is None:
                return False
            chain.append(nxt)
            current = nxt
        for cut in chain:
            if cut == anchor and self.cuts.file_zone(anchor) is None:
                continue
            if not self._contact(cut):
                return False
        return True


def resolve(corpus: Corpus, name: DomainName | str,
            qtype: RecordType | str = RecordType.A,
            failed_servers=(), budget: int = DEFAULT_BUDGET,
            cuts: CutIndex | None = None) -> ResolutionOutcome:
    """Resolve `name` for an address type under a simulated failure set."""
    if isinstance(name, str):
        name = DomainName.parse(name)
    if isinstance(qtype, str):
        qtype = RecordType(qtype)
    if qtype not in (RecordType.A, RecordType.AAAA):
        raise ValueError(f"resolve supports address queries, not {qtype.value}")
    failed = {DomainName.parse(f) if isinstance(f, str) else f
              for f in failed_servers}
    if cuts is None:
        cuts = CutIndex(corpus)
    run = _Resolution(cuts, failed, budget)
    try:
        result = run.query(name, qtype)
        if result is _DEAD:
            status, addresses = ResolutionStatus.UNRESOLVABLE, ()
        else:
            status, addresses = result
    except _BudgetExceeded:
        status, addresses = ResolutionStatus.LOOP_BUDGET_EXCEEDED, ()
    return ResolutionOutcome(
        name, qtype, status, tuple(addresses),
        tuple(sorted(str(s) for s in run.servers_touched)),
        tuple(sorted(str(z) for z in run.zones_touched)))
