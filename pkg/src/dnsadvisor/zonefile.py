"""Master-file parsing and deterministic serialization.

Supports the record subset SOA, NS, A, AAAA and CNAME plus the $ORIGIN and
$TTL directives, ';' comments, parenthesized continuations and relative
names. Known-but-unsupported types are skipped with a warning; unknown type
tokens are errors.
"""

from __future__ import annotations

from .model import RecordType, ResourceRecord, SoaData, Zone
from .names import DomainName, NameError_

# Types we recognize but do not model; lines carrying them parse-skip.
SKIPPED_TYPES = {
    "MX", "TXT", "SRV", "PTR", "DS", "DNSKEY", "NSEC", "NSEC3", "RRSIG",
    "CAA", "HINFO", "NAPTR", "SSHFP", "TLSA",
}

_CLASSES = {"IN", "CH", "HS"}


class ZoneFileError(ValueError):
    """A parse failure with file, line and column context."""

    def __init__(self, message: str, source: str, line: int, column: int = 1):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.source = source
        self.line = line
        self.column = column


def _strip_comment(line: str) -> str:
    # No quoted strings in the supported subset, so ';' always starts a comment.
    idx = line.find(";")
    return line if idx < 0 else line[:idx]


def _logical_lines(text: str, source: str):
    """Yield (line_number, content) with parenthesized groups joined."""
    pending: list[str] = []
    pending_line = 0
    depth = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        content = _strip_comment(raw)
        depth += content.count("(") - content.count(")")
        if depth < 0:
            raise ZoneFileError("unbalanced ')'", source, number)
        if depth > 0 or pending:
            if not pending:
                pending_line = number
            pending.append(content)
            if depth == 0:
                yield pending_line, " ".join(pending).replace("(", " ").replace(")", " ")
                pending = []
        else:
            yield number, content.replace("(", " ").replace(")", " ")
    if depth != 0:
        raise ZoneFileError("unbalanced '('", source, pending_line or 1)


def parse_zone_file(text: str, *, source: str = "<string>",
                    origin: DomainName | None = None) -> Zone:
    """Parse master-file text into a Zone.

    `origin` seeds the origin when the file carries no $ORIGIN directive.
    Raises ZoneFileError with line/column context on malformed input.
    """
    current_origin = origin
    declared_origin: DomainName | None = None
    current_ttl: int | None = None
    first_ttl: int | None = None
    last_owner: DomainName | None = None
    records: list[ResourceRecord] = []
    warnings: list[str] = []

    for number, line in _logical_lines(text, source):
        if not line.strip():
            continue
        tokens = line.split()
        directive = tokens[0].upper()

        if directive == "$ORIGIN":
            if len(tokens) != 2:
                raise ZoneFileError("$ORIGIN takes exactly one name", source, number)
            try:
                current_origin = DomainName.parse(tokens[1])
            except NameError_ as exc:
                raise ZoneFileError(str(exc), source, number) from exc
            if declared_origin is None:
                declared_origin = current_origin
            continue
        if directive == "$TTL":
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ZoneFileError("$TTL takes one integer", source, number)
            current_ttl = int(tokens[1])
            if first_ttl is None:
                first_ttl = current_ttl
                # Backfill records seen before the first $TTL so a zone's
                # serialized form reparses to an equal value.
                records = [r if r.ttl is not None
                           else ResourceRecord(r.owner, first_ttl, r.rclass,
                                               r.rtype, r.rdata)
                           for r in records]
            continue
        if directive.startswith("$"):
            raise ZoneFileError(f"unknown directive {tokens[0]}", source, number)

        starts_blank = line[0].isspace()
        try:
            record, last_owner, skipped = _parse_record(
                tokens, starts_blank, current_origin, last_owner,
                current_ttl, source, number)
        except NameError_ as exc:
            raise ZoneFileError(str(exc), source, number) from exc
        if skipped:
            warnings.append(f"{source}:{number}: skipped unsupported {skipped} record")
            continue
        assert record is not None
        records.append(record)

    zone_origin = declared_origin or origin
    if zone_origin is None:
        raise ZoneFileError("no $ORIGIN directive and no origin supplied", source, 1)
    return Zone(zone_origin, tuple(records), first_ttl, tuple(warnings))


def _parse_record(tokens, starts_blank, origin, last_owner, default_ttl,
                  source, number):
    i = 0
    if starts_blank:
        if last_owner is None:
            raise ZoneFileError("continuation line with no previous owner",
                                source, number)
        owner = last_owner
    else:
        if origin is None:
            raise ZoneFileError(
                f"relative name {tokens[0]!r} with no origin in scope",
                source, number)
        owner = DomainName.parse(tokens[0], origin)
        i = 1

    ttl: int | None = None
    rclass = "IN"
    while i < len(tokens):
        token = tokens[i]
        if token.isdigit():
            ttl = int(token)
            i += 1
        elif token.upper() in _CLASSES:
            rclass = token.upper()
            i += 1
        else:
            break
    if i >= len(tokens):
        raise ZoneFileError("missing record type", source, number)

    type_token = tokens[i].upper()
    i += 1
    if type_token in SKIPPED_TYPES:
        return None, owner, type_token
    try:
        rtype = RecordType(type_token)
    except ValueError:
        raise ZoneFileError(f"unsupported rtype {type_token!r}", source, number)

    rest = tokens[i:]
    if rtype in (RecordType.NS, RecordType.CNAME):
        if len(rest) != 1:
            raise ZoneFileError(f"{rtype.value} takes one name", source, number)
        rdata: object = DomainName.parse(rest[0], origin)
    elif rtype in (RecordType.A, RecordType.AAAA):
        if len(rest) != 1:
            raise ZoneFileError(f"{rtype.value} takes one address", source, number)
        rdata = rest[0]
    else:  # SOA
        if len(rest) != 7:
            raise ZoneFileError("SOA takes mname rname and five integers",
                                source, number)
        for value in rest[2:]:
            if not value.isdigit():
                raise ZoneFileError(f"SOA field {value!r} is not an integer",
                                    source, number)
        rdata = SoaData(DomainName.parse(rest[0], origin),
                        DomainName.parse(rest[1], origin),
                        *(int(v) for v in rest[2:]))

    if ttl is None:
        ttl = default_ttl
    try:
        record = ResourceRecord(owner, ttl, rclass, rtype, rdata)
    except ValueError as exc:
        raise ZoneFileError(str(exc), source, number) from exc
    return record, owner, None


def serialize_zone(zone: Zone) -> str:
    """Render a zone deterministically; parse(serialize(z)) == z.

    Names come out absolute, records in stored order, fields single-spaced
    with the owner column padded for readability.
    """
    lines = [f"$ORIGIN {zone.origin}"]
    if zone.default_ttl is not None:
        lines.append(f"$TTL {zone.default_ttl}")
    # Fixed owner column: adding a record with a long owner must not re-pad
    # every other line, or zone-file diffs would drown the actual change.
    width = 24
    for record in zone.records:
        fields = [str(record.owner).ljust(width)]
        if record.ttl is not None and record.ttl != zone.default_ttl:
            fields.append(str(record.ttl))
        # The class is IN-only in this subset; the parser treats it as
        # optional, so it is omitted on output.
        fields.append(record.rtype.value)
        fields.append(record.rdata_text())
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"
