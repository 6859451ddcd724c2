"""Domain name handling: absolute, case-folded, label-based."""

from __future__ import annotations

import re
from dataclasses import dataclass

_LABEL_RE = re.compile(r"^[A-Za-z0-9_]([A-Za-z0-9_-]*[A-Za-z0-9_])?$|^\*$")

MAX_LABEL_OCTETS = 63
MAX_NAME_OCTETS = 255


class NameError_(ValueError):
    """Raised for malformed domain names."""


@dataclass(frozen=True, order=True)
class DomainName:
    """An absolute DNS name as a tuple of lowercase labels, leftmost first.

    The root name is the empty tuple and renders as ".". Comparison and
    hashing are case-insensitive because labels are folded on construction.
    """

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        folded = tuple(label.lower() for label in self.labels)
        object.__setattr__(self, "labels", folded)
        for label in folded:
            if not label:
                raise NameError_("empty label in domain name")
            if len(label) > MAX_LABEL_OCTETS:
                raise NameError_(f"label exceeds {MAX_LABEL_OCTETS} octets: {label!r}")
            if not _LABEL_RE.match(label):
                raise NameError_(f"illegal characters in label {label!r}")
        if self.wire_length() > MAX_NAME_OCTETS:
            raise NameError_(f"name exceeds {MAX_NAME_OCTETS} octets: {self}")

    @classmethod
    def parse(cls, text: str, origin: "DomainName | None" = None) -> "DomainName":
        """Parse a name in master-file notation.

        Absolute names end in a dot. Relative names require an origin to
        append; "@" denotes the origin itself. A leading dot (as in
        "$ORIGIN .com.") is tolerated and stripped.
        """
        text = text.strip()
        if not text:
            raise NameError_("empty name")
        if text == "@":
            if origin is None:
                raise NameError_("@ used with no origin in scope")
            return origin
        if text == ".":
            return cls(())
        if text.startswith("."):
            text = text[1:]
        if text.endswith("."):
            return cls(tuple(text[:-1].split(".")))
        if origin is None:
            raise NameError_(f"relative name {text!r} with no origin in scope")
        return cls(tuple(text.split(".")) + origin.labels)

    def wire_length(self) -> int:
        return sum(len(label) + 1 for label in self.labels) + 1

    @property
    def is_root(self) -> bool:
        return not self.labels

    def parent(self) -> "DomainName":
        """The name minus its leftmost label."""
        if self.is_root:
            raise NameError_("the root name has no parent")
        return DomainName(self.labels[1:])

    def is_subdomain_of(self, other: "DomainName") -> bool:
        """True when this name equals `other` or sits below it."""
        if len(other.labels) > len(self.labels):
            return False
        return self.labels[len(self.labels) - len(other.labels):] == other.labels

    def is_proper_subdomain_of(self, other: "DomainName") -> bool:
        return self != other and self.is_subdomain_of(other)

    def __str__(self) -> str:
        if not self.labels:
            return "."
        return ".".join(self.labels) + "."

    def __repr__(self) -> str:
        return f"DomainName({str(self)!r})"


ROOT = DomainName(())
