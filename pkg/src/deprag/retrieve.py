"""Cascaded retrieval: seed-entity identification, one-hop expansion, cosine
re-ranking, optional reciprocal-rank-fusion hybrid search, and context
assembly.

The high-recall stage (exact-match seeds + one-hop traversal) keeps the
candidate set small; the precision stage re-ranks candidates by cosine
similarity against the query embedding. Hybrid mode fuses the graph-ranked
chunk list with a dense ranking over the whole chunk index so retrieval can
recover from seed-identification misses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .conllu import ParsedSentence, noun_chunks
from .errors import EngineError
from .extract import EmptyAfterCleaning, clean_noun_phrase
from .graph import EDGE_ENTITY_CHUNK, EDGE_ENTITY_ENTITY, ChunkNode, Edge, KnowledgeGraph
from .normalize import EmptyAfterNormalization, normalize_label
from .embed import (
    KIND_CHUNK,
    KIND_NODE,
    VectorIndex,
    ZeroVector,
    chunk_item_id,
    node_item_id,
    parse_node_item_id,
    relation_item_id,
)

DEFAULT_RRF_C = 60.0

# Question words and function words the fallback entity guesser ignores even
# when capitalized at the start of a query.
_GUESSER_STOPWORDS = frozenset(
    """a an and are as at be but by can could did do does for from how i if in
    is it its may might must of on or shall should that the their then there
    these this those to was were what when where which who whom whose why will
    with would you your""".split()
)

_QUOTED_RE = re.compile(r"\"([^\"]+)\"|'([^']+)'|“([^”]+)”")


class NoSeeds(EngineError):
    """Neither exact-match nor similarity search produced a seed node."""

    def __init__(self, entity_strings: list[str]):
        super().__init__("no seed nodes identified for query")
        self.entity_strings = entity_strings


@dataclass
class RetrievalConfig:
    seed_k: int = 5
    random_k_relations: int = 100  # 200 suits larger graphs
    top_k_chunks: int = 5
    hybrid: bool = False
    rrf_c: float = DEFAULT_RRF_C
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if min(self.seed_k, self.random_k_relations, self.top_k_chunks) < 1:
            raise ValueError("retrieval counts must be >= 1")
        if self.rrf_c <= 0:
            raise ValueError("rrf_c must be positive")


@dataclass
class RetrievalDiagnostics:
    used_fallback_guesser: bool = False
    degraded_dense_only: bool = False
    missing_embeddings: int = 0


@dataclass(frozen=True)
class ScoredChunk:
    chunk_id: str
    text: str
    score: float


@dataclass(frozen=True)
class ScoredRelation:
    subject: str
    relation: str
    object: str
    score: float


@dataclass
class RetrievalContext:
    chunks: list[ScoredChunk]
    relations: list[ScoredRelation]
    entity: list[str]
    diagnostics: RetrievalDiagnostics = field(default_factory=RetrievalDiagnostics)

    def to_dict(self) -> dict:
        """The serialized context: exactly the keys chunks/relations/entity."""
        return {
            "chunks": [
                {"chunk_id": c.chunk_id, "text": c.text, "score": c.score}
                for c in self.chunks
            ],
            "relations": [
                {
                    "subject": r.subject,
                    "relation": r.relation,
                    "object": r.object,
                    "score": r.score,
                }
                for r in self.relations
            ],
            "entity": list(self.entity),
        }

    def render_text(self) -> str:
        """A plain-text rendering suitable for pasting into an LLM prompt."""
        lines = ["Entities: " + (", ".join(self.entity) if self.entity else "(none)")]
        lines.append("Relations:")
        for r in self.relations:
            lines.append(f"  {r.subject} --{r.relation}--> {r.object}")
        lines.append("Chunks:")
        for c in self.chunks:
            lines.append(f"  [{c.chunk_id}] {c.text}")
        return "\n".join(lines)


def guess_noun_phrases(query: str) -> list[str]:
    """Entity guesser for queries without a dependency parse.

    Picks quoted spans and runs of capitalized/uppercase tokens, skipping
    stopwords. A coarse stand-in for real noun chunks; callers see a
    diagnostics flag when it was used.
    """
    phrases: list[str] = []
    for match in _QUOTED_RE.finditer(query):
        span = next(g for g in match.groups() if g)
        phrases.append("_".join(span.split()))
    unquoted = _QUOTED_RE.sub(" ", query)
    tokens = [t.strip("\"'.,;:!?()[]{}") for t in unquoted.split()]
    run: list[str] = []
    for token in tokens:
        capitalized = bool(token) and token[0].isupper()
        if capitalized and token.lower() not in _GUESSER_STOPWORDS:
            run.append(token)
        else:
            if run:
                phrases.append("_".join(run))
            run = []
    if run:
        phrases.append("_".join(run))
    seen: set[str] = set()
    out = []
    for p in phrases:
        if p.lower() not in seen:
            seen.add(p.lower())
            out.append(p)
    return out


def identify_query_entities(
    query: str,
    parsed_query: ParsedSentence | None,
    graph: KnowledgeGraph,
    index: VectorIndex,
    embedder,
    cfg: RetrievalConfig,
    diagnostics: RetrievalDiagnostics | None = None,
) -> tuple[list[str], list[int]]:
    """Merge exact-match noun-chunk seeds with similarity-search seeds.

    Returns (entity strings, seed node ids). Entity strings list the display
    labels of matched nodes plus any unmatched noun-chunk strings, noun-chunk
    order first, then similarity rank order. Raises NoSeeds when both legs
    come up empty.
    """
    if diagnostics is None:
        diagnostics = RetrievalDiagnostics()
    if parsed_query is not None:
        phrases = []
        for _, span in noun_chunks(parsed_query):
            try:
                phrases.append(clean_noun_phrase(list(span)))
            except EmptyAfterCleaning:
                continue
    else:
        diagnostics.used_fallback_guesser = True
        phrases = guess_noun_phrases(query)

    try:
        query_vec = embedder.embed(query)
    except ZeroVector:
        query_vec = None
    similar: list[int] = []
    if query_vec is not None:
        similar = [
            parse_node_item_id(item_id)
            for item_id, _ in index.top_k(query_vec, cfg.seed_k, KIND_NODE)
        ]

    seeds: list[int] = []
    entity_strings: list[str] = []
    seen_keys: set[str] = set()
    for phrase in phrases:
        node_id = graph.lookup_exact(phrase)
        if node_id is not None:
            if node_id not in seeds:
                seeds.append(node_id)
            display = graph.entity_label(node_id).display
        else:
            display = phrase
        try:
            key = normalize_label(display).key
        except EmptyAfterNormalization:
            continue
        if key not in seen_keys:
            seen_keys.add(key)
            entity_strings.append(display)
    for node_id in similar:
        if node_id not in seeds:
            seeds.append(node_id)
        display = graph.entity_label(node_id).display
        if display.lower() not in seen_keys:
            seen_keys.add(display.lower())
            entity_strings.append(display)

    if not seeds:
        raise NoSeeds(entity_strings)
    return entity_strings, seeds


def expand_and_split(
    graph: KnowledgeGraph, seeds: list[int], cfg: RetrievalConfig
) -> tuple[list[Edge], list[Edge]]:
    """One-hop expansion partitioned into predicate and mention edges."""
    edges = graph.one_hop(seeds, cfg.random_k_relations, cfg.rng_seed)
    ee = [e for e in edges if e.kind == EDGE_ENTITY_ENTITY]
    ec = [e for e in edges if e.kind == EDGE_ENTITY_CHUNK]
    return ee, ec


def rank_and_select(
    query_vec: np.ndarray,
    ee_candidates: list[Edge],
    ec_candidates: list[Edge],
    graph: KnowledgeGraph,
    index: VectorIndex,
    cfg: RetrievalConfig,
    diagnostics: RetrievalDiagnostics | None = None,
) -> tuple[list[ScoredChunk], list[ScoredRelation]]:
    """Cosine re-ranking: top-k chunks and top-2k relations.

    Candidates without an index entry are skipped and counted in the
    diagnostics. Ties break by item id ascending, matching the index's
    top_k ordering.
    """
    if diagnostics is None:
        diagnostics = RetrievalDiagnostics()

    chunk_nodes: list[ChunkNode] = []
    seen_chunks: set[int] = set()
    for edge in ec_candidates:
        node = graph.nodes[edge.dst]
        if isinstance(node, ChunkNode) and node.id not in seen_chunks:
            seen_chunks.add(node.id)
            chunk_nodes.append(node)
    scored_chunks: list[tuple[str, ChunkNode, float]] = []
    for node in chunk_nodes:
        item_id = chunk_item_id(node.chunk_id)
        vec = index.get(item_id)
        if vec is None:
            diagnostics.missing_embeddings += 1
            continue
        scored_chunks.append((item_id, node, float(np.dot(query_vec, vec))))
    scored_chunks.sort(key=lambda row: (-row[2], row[0]))
    top_chunks = [
        ScoredChunk(chunk_id=node.chunk_id, text=node.text, score=score)
        for _, node, score in scored_chunks[: cfg.top_k_chunks]
    ]

    scored_relations: list[tuple[str, Edge, float]] = []
    for edge in ee_candidates:
        item_id = relation_item_id(edge.src, edge.predicate, edge.dst)
        vec = index.get(item_id)
        if vec is None:
            diagnostics.missing_embeddings += 1
            continue
        scored_relations.append((item_id, edge, float(np.dot(query_vec, vec))))
    scored_relations.sort(key=lambda row: (-row[2], row[0]))
    top_relations = [
        ScoredRelation(
            subject=graph.entity_label(edge.src).display,
            relation=edge.predicate,
            object=graph.entity_label(edge.dst).display,
            score=score,
        )
        for _, edge, score in scored_relations[: 2 * cfg.top_k_chunks]
    ]
    return top_chunks, top_relations


def rrf_fuse(
    ranking_a: list[str], ranking_b: list[str], c: float = DEFAULT_RRF_C
) -> list[tuple[str, float]]:
    """Reciprocal rank fusion: score(d) = sum over rankings of 1/(c + rank).

    Ranks are 1-based; each input ranking must be duplicate-free. Output is
    sorted by fused score descending, ties by id ascending.
    """
    scores: dict[str, float] = {}
    for ranking in (ranking_a, ranking_b):
        if len(set(ranking)) != len(ranking):
            raise ValueError("ranking contains duplicate ids")
        for rank, item_id in enumerate(ranking, start=1):
            scores[item_id] = scores.get(item_id, 0.0) + 1.0 / (c + rank)
    return sorted(scores.items(), key=lambda pair: (-pair[1], pair[0]))


def _dense_chunks(
    query_vec: np.ndarray, graph: KnowledgeGraph, index: VectorIndex, k: int
) -> list[ScoredChunk]:
    out = []
    for item_id, score in index.top_k(query_vec, k, KIND_CHUNK):
        chunk_id = item_id.split(":", 1)[1]
        node_id = graph.chunk_index.get(chunk_id)
        text = graph.nodes[node_id].text if node_id is not None else ""
        out.append(ScoredChunk(chunk_id=chunk_id, text=text, score=score))
    return out


def retrieve(
    query: str,
    graph: KnowledgeGraph,
    index: VectorIndex,
    embedder,
    cfg: RetrievalConfig,
    parsed_query: ParsedSentence | None = None,
) -> RetrievalContext:
    """Run the full cascade and assemble the retrieval context.

    When seed identification fails entirely the result degrades to a dense
    ranking over chunks with no relations (flagged in diagnostics). With
    cfg.hybrid the chunk list is the reciprocal-rank fusion of the
    graph-ranked chunks and the dense top-k over the whole chunk index.
    """
    diagnostics = RetrievalDiagnostics()
    try:
        query_vec = embedder.embed(query)
    except ZeroVector:
        query_vec = None

    try:
        entity_strings, seeds = identify_query_entities(
            query, parsed_query, graph, index, embedder, cfg, diagnostics
        )
    except NoSeeds as exc:
        diagnostics.degraded_dense_only = True
        chunks = (
            _dense_chunks(query_vec, graph, index, cfg.top_k_chunks)
            if query_vec is not None
            else []
        )
        return RetrievalContext(
            chunks=chunks,
            relations=[],
            entity=exc.entity_strings,
            diagnostics=diagnostics,
        )

    if query_vec is None:
        return RetrievalContext(
            chunks=[], relations=[], entity=entity_strings, diagnostics=diagnostics
        )

    ee_candidates, ec_candidates = expand_and_split(graph, seeds, cfg)
    top_chunks, top_relations = rank_and_select(
        query_vec, ee_candidates, ec_candidates, graph, index, cfg, diagnostics
    )

    if cfg.hybrid:
        graph_ids = [chunk_item_id(c.chunk_id) for c in top_chunks]
        dense = _dense_chunks(query_vec, graph, index, cfg.top_k_chunks)
        dense_ids = [chunk_item_id(c.chunk_id) for c in dense]
        texts = {chunk_item_id(c.chunk_id): c for c in list(top_chunks) + dense}
        fused = rrf_fuse(graph_ids, dense_ids, cfg.rrf_c)[: cfg.top_k_chunks]
        top_chunks = [
            ScoredChunk(
                chunk_id=texts[item_id].chunk_id,
                text=texts[item_id].text,
                score=score,
            )
            for item_id, score in fused
        ]

    return RetrievalContext(
        chunks=top_chunks,
        relations=top_relations,
        entity=entity_strings,
        diagnostics=diagnostics,
    )
