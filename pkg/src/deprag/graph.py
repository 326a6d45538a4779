"""In-memory property graph: entity and chunk nodes, predicate and mention
edges, a case-insensitive name index, seeded one-hop traversal, statistics,
and line-delimited persistence.

The store is built single-writer, then frozen for unlimited concurrent
readers. Node ids are dense and insertion-ordered, stable across a
serialize/load round-trip.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import EngineError
from .normalize import CanonicalLabel, NormalizedTriple, normalize_label

MENTION_PREDICATE = "mentioned_in"

EDGE_ENTITY_ENTITY = "ee"
EDGE_ENTITY_CHUNK = "ec"


class GraphIoError(EngineError):
    """Unreadable or unwritable graph file."""


class GraphFormatError(EngineError):
    """A graph file line that does not decode to a valid record."""


@dataclass(frozen=True)
class EntityNode:
    id: int
    label: CanonicalLabel


@dataclass(frozen=True)
class ChunkNode:
    id: int
    chunk_id: str
    text: str


@dataclass
class Edge:
    src: int
    dst: int
    kind: str  # EDGE_ENTITY_ENTITY or EDGE_ENTITY_CHUNK
    predicate: str
    count: int = 1
    provenance: list[str] = field(default_factory=list)


class KnowledgeGraph:
    def __init__(self) -> None:
        self.nodes: list[EntityNode | ChunkNode] = []
        self.edges: list[Edge] = []
        self.name_index: dict[str, int] = {}
        self.chunk_index: dict[str, int] = {}
        # node id -> incident edge indices, insertion order, both directions
        self.adjacency: list[list[int]] = []
        self._edge_index: dict[tuple[str, int, str, int], int] = {}

    # -- construction -------------------------------------------------------

    def _add_node(self, node: EntityNode | ChunkNode) -> int:
        self.nodes.append(node)
        self.adjacency.append([])
        return node.id

    def ensure_entity(self, label: CanonicalLabel) -> int:
        node_id = self.name_index.get(label.key)
        if node_id is None:
            node_id = self._add_node(EntityNode(id=len(self.nodes), label=label))
            self.name_index[label.key] = node_id
        return node_id

    def ensure_chunk(self, chunk_id: str, text: str) -> int:
        node_id = self.chunk_index.get(chunk_id)
        if node_id is None:
            node_id = self._add_node(
                ChunkNode(id=len(self.nodes), chunk_id=chunk_id, text=text)
            )
            self.chunk_index[chunk_id] = node_id
        return node_id

    def upsert_edge(
        self,
        src: int,
        dst: int,
        kind: str,
        predicate: str,
        count: int = 1,
        provenance: list[str] | None = None,
    ) -> Edge:
        key = (kind, src, predicate, dst)
        idx = self._edge_index.get(key)
        if idx is None:
            edge = Edge(src=src, dst=dst, kind=kind, predicate=predicate, count=count)
            idx = len(self.edges)
            self.edges.append(edge)
            self._edge_index[key] = idx
            self.adjacency[src].append(idx)
            self.adjacency[dst].append(idx)
        else:
            edge = self.edges[idx]
            edge.count += count
        if provenance:
            seen = set(edge.provenance)
            for sid in provenance:
                if sid not in seen:
                    seen.add(sid)
                    edge.provenance.append(sid)
        return edge

    def insert_triple(
        self,
        triple: NormalizedTriple,
        chunk_id: str,
        chunk_text: str,
        occurrences: int = 1,
        sent_ids: list[str] | None = None,
    ) -> Edge:
        """Upsert nodes and edges for one (already normalized) triple.

        Creates subject/object entity nodes and the chunk node when absent,
        increments the predicate edge by ``occurrences``, and records
        mention edges from both entities to the chunk.
        """
        subj = self.ensure_entity(triple.subject)
        obj = self.ensure_entity(triple.object)
        chunk_node = self.ensure_chunk(chunk_id, chunk_text)
        sids = sent_ids or []
        edge = self.upsert_edge(
            subj,
            obj,
            EDGE_ENTITY_ENTITY,
            triple.relation.key,
            count=occurrences,
            provenance=sids,
        )
        for entity in (subj, obj):
            self.upsert_edge(
                entity,
                chunk_node,
                EDGE_ENTITY_CHUNK,
                MENTION_PREDICATE,
                count=occurrences,
                provenance=sids,
            )
        return edge

    # -- queries ------------------------------------------------------------

    def lookup_exact(self, name: str) -> int | None:
        """Case-insensitive exact-match lookup; no fuzzy or prefix matching."""
        try:
            key = normalize_label(name).key
        except EngineError:
            return None
        return self.name_index.get(key)

    def entity_label(self, node_id: int) -> CanonicalLabel:
        node = self.nodes[node_id]
        if not isinstance(node, EntityNode):
            raise GraphFormatError(f"node {node_id} is not an entity node")
        return node.label

    def one_hop(
        self, seeds: list[int], random_k_relations: int, rng_seed: int = 0
    ) -> list[Edge]:
        """Incident edges of every seed, capped per seed by uniform sampling.

        A seed whose incident-edge count exceeds ``random_k_relations``
        contributes a sample of exactly that many edges, drawn with a
        deterministic partial Fisher-Yates shuffle from ``rng_seed``. The
        union is deduplicated; order is by seed, then edge insertion order.
        """
        if random_k_relations < 1:
            raise ValueError("random_k_relations must be >= 1")
        rng = random.Random(rng_seed)
        out: list[Edge] = []
        emitted: set[int] = set()
        for seed in seeds:
            incident = self.adjacency[seed]
            if len(incident) > random_k_relations:
                chosen = sorted(_sample(incident, random_k_relations, rng))
            else:
                chosen = list(incident)
            for idx in chosen:
                if idx not in emitted:
                    emitted.add(idx)
                    out.append(self.edges[idx])
        return out

    def degree_stats(self) -> dict:
        """Node/edge counts plus degree figures (degree counts both edge kinds)."""
        degrees = [len(a) for a in self.adjacency]
        total_nodes = len(self.nodes)
        total_edges = len(self.edges)
        return {
            "entity_nodes": sum(1 for n in self.nodes if isinstance(n, EntityNode)),
            "chunk_nodes": sum(1 for n in self.nodes if isinstance(n, ChunkNode)),
            "ee_edges": sum(1 for e in self.edges if e.kind == EDGE_ENTITY_ENTITY),
            "ec_edges": sum(1 for e in self.edges if e.kind == EDGE_ENTITY_CHUNK),
            "avg_degree": (2 * total_edges / total_nodes) if total_nodes else 0.0,
            "max_degree": max(degrees, default=0),
        }

    # -- persistence --------------------------------------------------------

    def serialize(self, path: str) -> None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                for node in self.nodes:
                    if isinstance(node, EntityNode):
                        record = {"t": "en", "id": node.id, "label": node.label.display}
                    else:
                        record = {
                            "t": "cn",
                            "id": node.id,
                            "chunk_id": node.chunk_id,
                            "text": node.text,
                        }
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                for edge in self.edges:
                    fh.write(
                        json.dumps(
                            {
                                "t": edge.kind,
                                "src": edge.src,
                                "dst": edge.dst,
                                "predicate": edge.predicate,
                                "count": edge.count,
                                "provenance": edge.provenance,
                            },
                            ensure_ascii=False,
                        )
                        + "\n"
                    )
        except OSError as exc:
            raise GraphIoError(f"cannot write graph to {path}: {exc}") from exc

    @classmethod
    def load(cls, path: str) -> "KnowledgeGraph":
        g = cls()
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise GraphIoError(f"cannot read graph from {path}: {exc}") from exc
        for lineno, line in enumerate(lines, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise GraphFormatError(f"{path}:{lineno}: invalid record: {exc}") from exc
            kind = record.get("t")
            if kind == "en":
                g._load_entity(record, path, lineno)
            elif kind == "cn":
                g._load_chunk(record, path, lineno)
            elif kind in (EDGE_ENTITY_ENTITY, EDGE_ENTITY_CHUNK):
                g._load_edge(record, path, lineno)
            else:
                raise GraphFormatError(f"{path}:{lineno}: unknown record type {kind!r}")
        return g

    def _load_entity(self, record: dict, path: str, lineno: int) -> None:
        if record.get("id") != len(self.nodes):
            raise GraphFormatError(
                f"{path}:{lineno}: node id {record.get('id')} out of order"
            )
        label = record.get("label")
        if not isinstance(label, str) or not label:
            raise GraphFormatError(f"{path}:{lineno}: entity node missing label")
        node_id = self._add_node(
            EntityNode(id=len(self.nodes), label=CanonicalLabel(label, label.lower()))
        )
        self.name_index[label.lower()] = node_id

    def _load_chunk(self, record: dict, path: str, lineno: int) -> None:
        if record.get("id") != len(self.nodes):
            raise GraphFormatError(
                f"{path}:{lineno}: node id {record.get('id')} out of order"
            )
        chunk_id = record.get("chunk_id")
        if not isinstance(chunk_id, str) or not chunk_id:
            raise GraphFormatError(f"{path}:{lineno}: chunk node missing chunk_id")
        node_id = self._add_node(
            ChunkNode(id=len(self.nodes), chunk_id=chunk_id, text=record.get("text", ""))
        )
        self.chunk_index[chunk_id] = node_id

    def _load_edge(self, record: dict, path: str, lineno: int) -> None:
        src, dst = record.get("src"), record.get("dst")
        for endpoint in (src, dst):
            if not isinstance(endpoint, int) or not 0 <= endpoint < len(self.nodes):
                raise GraphFormatError(
                    f"{path}:{lineno}: edge references unknown node id {endpoint}"
                )
        self.upsert_edge(
            src,
            dst,
            record["t"],
            record.get("predicate", ""),
            count=int(record.get("count", 1)),
            provenance=list(record.get("provenance", [])),
        )


def _sample(items: list[int], k: int, rng: random.Random) -> list[int]:
    """Uniform sample of k items via a partial Fisher-Yates shuffle.

    Implemented here (rather than random.sample) so the draw is reproducible
    regardless of stdlib sampling internals.
    """
    pool = list(items)
    for i in range(k):
        j = rng.randrange(i, len(pool))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]
