"""Entity/relation canonicalization, triple deduplication, and schema
filtering.

Labels keep a human-readable display form and a lowercase match key so
retrieval's case-insensitive exact match works without destroying casing.
Characters unsafe for graph stores (colons, quotes, path separators, control
characters) become underscores.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .errors import EngineError

if TYPE_CHECKING:
    from .extract import Triple

FORBIDDEN_CHARS = ":;,\"'\n\t\x00\\/"

_FORBIDDEN_RE = re.compile("[" + re.escape(FORBIDDEN_CHARS) + r"\s]+")


class EmptyAfterNormalization(EngineError):
    """The raw label contained nothing but forbidden characters."""


class SchemaError(EngineError):
    """A schema file that cannot be read or has the wrong shape."""


@dataclass(frozen=True)
class CanonicalLabel:
    display: str
    key: str

    def __str__(self) -> str:
        return self.display


def normalize_label(raw: str) -> CanonicalLabel:
    """Canonicalize a raw entity or relation string.

    Compatibility-composes Unicode, replaces forbidden characters and
    whitespace with '_', collapses underscore runs, and trims the ends.
    """
    text = unicodedata.normalize("NFKC", raw)
    text = _FORBIDDEN_RE.sub("_", text)
    text = re.sub("_+", "_", text).strip("_")
    if not text:
        raise EmptyAfterNormalization(f"label {raw!r} normalized to nothing")
    return CanonicalLabel(display=text, key=text.lower())


@dataclass(frozen=True)
class NormalizedTriple:
    subject: CanonicalLabel
    relation: CanonicalLabel
    object: CanonicalLabel
    count: int
    # (chunk_id, sent_id) pairs, first occurrence first, no duplicates.
    provenance: tuple[tuple[str, str], ...]

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.subject.key, self.relation.key, self.object.key)


def dedupe_triples(triples: Iterable["Triple"]) -> list[NormalizedTriple]:
    """Merge triples equal under normalized (subject, relation, object) keys.

    First-seen display strings win; the merged record carries an occurrence
    count and the union of provenance pairs, ordered by first occurrence.
    """
    merged: dict[tuple[str, str, str], dict] = {}
    for t in triples:
        subject = normalize_label(t.subject)
        relation = normalize_label(t.relation)
        obj = normalize_label(t.object)
        key = (subject.key, relation.key, obj.key)
        entry = merged.get(key)
        if entry is None:
            merged[key] = {
                "subject": subject,
                "relation": relation,
                "object": obj,
                "count": 1,
                "provenance": [(t.chunk_id, t.sent_id)],
                "seen": {(t.chunk_id, t.sent_id)},
            }
        else:
            entry["count"] += 1
            pair = (t.chunk_id, t.sent_id)
            if pair not in entry["seen"]:
                entry["seen"].add(pair)
                entry["provenance"].append(pair)
    return [
        NormalizedTriple(
            subject=e["subject"],
            relation=e["relation"],
            object=e["object"],
            count=e["count"],
            provenance=tuple(e["provenance"]),
        )
        for e in merged.values()
    ]


def _glob_to_regex(pattern: str) -> re.Pattern[str]:
    # Only '*' is a wildcard; everything else matches literally.
    parts = [re.escape(p) for p in pattern.split("*")]
    return re.compile("^" + ".*".join(parts) + "$")


@dataclass(frozen=True)
class Schema:
    allowed_relations: frozenset[str] = frozenset()
    allowed_entity_patterns: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, data: dict) -> "Schema":
        relations = data.get("allowed_relations", [])
        patterns = data.get("allowed_entity_patterns", [])
        if not isinstance(relations, list) or not isinstance(patterns, list):
            raise SchemaError("schema arrays must be lists of strings")
        return cls(
            allowed_relations=frozenset(str(r).lower() for r in relations),
            allowed_entity_patterns=tuple(str(p).lower() for p in patterns),
        )

    @classmethod
    def load(cls, path: str) -> "Schema":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"cannot load schema {path}: {exc}") from exc
        return cls.from_dict(data)

    @property
    def is_empty(self) -> bool:
        return not self.allowed_relations and not self.allowed_entity_patterns

    def allows_relation(self, key: str) -> bool:
        return not self.allowed_relations or key in self.allowed_relations

    def allows_entity(self, key: str) -> bool:
        if not self.allowed_entity_patterns:
            return True
        return any(
            _glob_to_regex(p).match(key) for p in self.allowed_entity_patterns
        )


def apply_schema(
    triples: list[NormalizedTriple], schema: Schema
) -> list[NormalizedTriple]:
    """Keep triples conforming to the schema; an empty schema is identity."""
    if schema.is_empty:
        return list(triples)
    return [
        t
        for t in triples
        if schema.allows_relation(t.relation.key)
        and schema.allows_entity(t.subject.key)
        and schema.allows_entity(t.object.key)
    ]
