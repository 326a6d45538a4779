"""Embedding providers and the brute-force cosine vector index.

Two providers share one interface: a remote HTTP client for production
embeddings, and a deterministic local feature-hashing embedder that needs no
network or model files. Hash embeddings are bag-of-tokens: each lowercase
token lands in a signed bucket derived from a keyed blake2b digest, so the
same text maps to the same unit vector on any platform.

The index is an exhaustive scan. At desk scale (<= 1e5 items) exact search
stays well within the latency budget and makes oracle testing trivial; an
approximate-NN backend could slot in behind the same top_k contract.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import os
import time
from dataclasses import dataclass, field
import numpy as np
import requests

from .errors import EngineError

DEFAULT_DIMENSION = 256

KIND_NODE = "node"
KIND_CHUNK = "chunk"
KIND_RELATION = "relation"

API_KEY_ENV = "EMBED_API_KEY"


class ZeroVector(EngineError):
    """Embedding input produced (or was) an all-zero vector."""


class DimensionMismatch(EngineError):
    pass


class TransportError(EngineError):
    """Network failure or a non-retryable HTTP error from the endpoint."""


class RateLimited(EngineError):
    """Endpoint kept returning 429 after the configured retries."""


class IndexIoError(EngineError):
    pass


class IndexFormatError(EngineError):
    pass


def _bucket_and_sign(token: str, dimension: int) -> tuple[int, float]:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    bucket = int.from_bytes(digest[:4], "big") % dimension
    sign = 1.0 if digest[4] & 1 else -1.0
    return bucket, sign


def hash_embed(text: str, dimension: int = DEFAULT_DIMENSION) -> np.ndarray:
    """Deterministic bag-of-tokens feature hashing, L2-normalized.

    Tokenization lowercases and splits on whitespace and underscores, so an
    entity label and its surface phrase embed identically.
    """
    if dimension < 8:
        raise ValueError(f"dimension must be >= 8, got {dimension}")
    tokens = text.lower().replace("_", " ").split()
    if not tokens:
        raise ZeroVector(f"no tokens to embed in {text!r}")
    vec = np.zeros(dimension, dtype=np.float64)
    for token in tokens:
        bucket, sign = _bucket_and_sign(token, dimension)
        vec[bucket] += sign
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ZeroVector(f"token signs cancelled for {text!r}")
    return vec / norm


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"shapes differ: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine of a zero vector is undefined")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


@dataclass
class EmbedConfig:
    kind: str = "hash"  # "hash" | "remote"
    endpoint: str = ""
    model: str = ""
    dimension: int = DEFAULT_DIMENSION
    batch_size: int = 64
    max_retries: int = 3
    parallel_requests: int = 1
    retry_base_seconds: float = 0.5
    timeout_seconds: float = 30.0


class HashEmbedder:
    def __init__(self, dimension: int = DEFAULT_DIMENSION) -> None:
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        return hash_embed(text, self.dimension)

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


class RemoteEmbedder:
    """Client for an OpenAI-style embeddings endpoint.

    Requests are batched, optionally issued concurrently, and reassembled in
    input order; 429 responses retry with exponential backoff.
    """

    def __init__(self, config: EmbedConfig, session: requests.Session | None = None):
        if not config.endpoint:
            raise TransportError("remote embedding endpoint not configured")
        self.config = config
        self.session = session or requests.Session()
        self.dimension: int | None = config.dimension if config.dimension else None

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        return headers

    def _post_batch(self, batch: list[str]) -> list[np.ndarray]:
        attempt = 0
        while True:
            try:
                response = self.session.post(
                    self.config.endpoint,
                    json={"input": batch, "model": self.config.model},
                    headers=self._headers(),
                    timeout=self.config.timeout_seconds,
                )
            except requests.RequestException as exc:
                raise TransportError(f"embedding request failed: {exc}") from exc
            if response.status_code == 429:
                if attempt >= self.config.max_retries:
                    raise RateLimited(
                        f"rate limited after {attempt} retries at {self.config.endpoint}"
                    )
                time.sleep(self.config.retry_base_seconds * (2**attempt))
                attempt += 1
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"embedding endpoint returned {response.status_code}: "
                    f"{response.text[:200]}"
                )
            return self._parse_response(response, len(batch))

    def _parse_response(self, response: requests.Response, expected: int) -> list[np.ndarray]:
        try:
            payload = response.json()
            rows = payload["data"]
        except (ValueError, KeyError) as exc:
            raise TransportError(f"malformed embedding response: {exc}") from exc
        if len(rows) != expected:
            raise TransportError(
                f"embedding response has {len(rows)} rows, expected {expected}"
            )
        out: list[np.ndarray | None] = [None] * expected
        for row in rows:
            vec = np.asarray(row["embedding"], dtype=np.float64)
            if self.dimension is None:
                self.dimension = int(vec.shape[0])
            if vec.shape[0] != self.dimension:
                raise DimensionMismatch(
                    f"embedding dimension {vec.shape[0]} != expected {self.dimension}"
                )
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                raise ZeroVector("endpoint returned a zero vector")
            out[int(row["index"])] = vec / norm
        if any(v is None for v in out):
            raise TransportError("embedding response missing indices")
        return out  # type: ignore[return-value]

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        if not texts:
            return []
        batches = [
            texts[i : i + self.config.batch_size]
            for i in range(0, len(texts), self.config.batch_size)
        ]
        if self.config.parallel_requests > 1 and len(batches) > 1:
            with concurrent.futures.ThreadPoolExecutor(
                max_workers=self.config.parallel_requests
            ) as pool:
                results = list(pool.map(self._post_batch, batches))
        else:
            results = [self._post_batch(b) for b in batches]
        return [vec for batch in results for vec in batch]

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]


def embed_remote(texts: list[str], config: EmbedConfig) -> list[np.ndarray]:
    return RemoteEmbedder(config).embed_batch(texts)


def make_embedder(config: EmbedConfig):
    if config.kind == "remote":
        return RemoteEmbedder(config)
    return HashEmbedder(config.dimension)


@dataclass
class VectorIndex:
    dimension: int = DEFAULT_DIMENSION
    entries: dict[str, tuple[np.ndarray, str]] = field(default_factory=dict)
    _scan_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def insert(self, item_id: str, vector: np.ndarray, kind: str) -> None:
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self.dimension,):
            raise DimensionMismatch(
                f"vector for {item_id!r} has shape {vec.shape}, index dimension "
                f"is {self.dimension}"
            )
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ZeroVector(f"zero vector for {item_id!r}")
        if abs(norm - 1.0) > 1e-6:
            vec = vec / norm
        self.entries[item_id] = (vec, kind)
        self._scan_cache.clear()

    def get(self, item_id: str) -> np.ndarray | None:
        entry = self.entries.get(item_id)
        return entry[0] if entry else None

    def _scan_arrays(self, kind_filter: str | None) -> tuple[list[str], np.ndarray]:
        cached = self._scan_cache.get(kind_filter)
        if cached is None:
            ids = [
                item_id
                for item_id, (_, kind) in self.entries.items()
                if kind_filter is None or kind == kind_filter
            ]
            matrix = (
                np.stack([self.entries[i][0] for i in ids])
                if ids
                else np.zeros((0, self.dimension))
            )
            cached = (ids, matrix)
            self._scan_cache[kind_filter] = cached
        return cached

    def top_k(
        self, query: np.ndarray, k: int, kind_filter: str | None = None
    ) -> list[tuple[str, float]]:
        """Exhaustive scan: score descending, ties broken by item id ascending."""
        if k < 1:
            raise ValueError("k must be >= 1")
        query = np.asarray(query, dtype=np.float64)
        if query.shape != (self.dimension,):
            raise DimensionMismatch(
                f"query shape {query.shape} != index dimension {self.dimension}"
            )
        norm = float(np.linalg.norm(query))
        if norm == 0.0:
            raise ZeroVector("cannot search with a zero query vector")
        ids, matrix = self._scan_arrays(kind_filter)
        if not ids:
            return []
        scores = np.clip(matrix @ (query / norm), -1.0, 1.0)
        # lexsort: last key is primary, so ids ascending break score ties.
        order = np.lexsort((np.asarray(ids), -scores))
        return [(ids[i], float(scores[i])) for i in order[:k]]

    # -- persistence --------------------------------------------------------

    def serialize(self, path: str) -> None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                for item_id in self.entries:
                    vec, kind = self.entries[item_id]
                    fh.write(
                        json.dumps(
                            {"item_id": item_id, "kind": kind, "vector": vec.tolist()},
                            ensure_ascii=False,
                        )
                        + "\n"
                    )
        except OSError as exc:
            raise IndexIoError(f"cannot write index to {path}: {exc}") from exc

    @classmethod
    def load(cls, path: str, dimension: int | None = None) -> "VectorIndex":
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise IndexIoError(f"cannot read index from {path}: {exc}") from exc
        index: VectorIndex | None = (
            cls(dimension=dimension) if dimension is not None else None
        )
        for lineno, line in enumerate(lines, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                item_id = record["item_id"]
                kind = record["kind"]
                vector = np.asarray(record["vector"], dtype=np.float64)
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise IndexFormatError(f"{path}:{lineno}: invalid record: {exc}") from exc
            if index is None:
                index = cls(dimension=int(vector.shape[0]))
            index.insert(item_id, vector, kind)
        return index if index is not None else cls(dimension=dimension or DEFAULT_DIMENSION)


def relation_text(subject_display: str, relation_key: str, object_display: str) -> str:
    """The text embedded for an entity-to-entity edge."""
    return f"{subject_display} {relation_key} {object_display}"


def node_item_id(node_id: int) -> str:
    return f"node:{node_id}"


def chunk_item_id(chunk_id: str) -> str:
    return f"chunk:{chunk_id}"


def relation_item_id(src: int, predicate: str, dst: int) -> str:
    return f"rel:{src}:{predicate}:{dst}"


def parse_node_item_id(item_id: str) -> int:
    return int(item_id.split(":", 1)[1])


def index_graph(
    graph,
    embedder,
    index: VectorIndex | None = None,
) -> tuple[VectorIndex, int]:
    """Embed every entity node, chunk node, and predicate edge of a graph.

    Texts are embedded in batches (one pass for the remote provider).
    Returns the index and a count of items skipped because their text had no
    tokens to embed.
    """
    from .graph import EDGE_ENTITY_ENTITY, ChunkNode, EntityNode

    if index is None:
        index = VectorIndex(dimension=getattr(embedder, "dimension", DEFAULT_DIMENSION))
    rows: list[tuple[str, str, str]] = []
    for node in graph.nodes:
        if isinstance(node, EntityNode):
            rows.append((node_item_id(node.id), node.label.display, KIND_NODE))
        elif isinstance(node, ChunkNode):
            rows.append((chunk_item_id(node.chunk_id), node.text, KIND_CHUNK))
    for edge in graph.edges:
        if edge.kind != EDGE_ENTITY_ENTITY:
            continue
        subject = graph.entity_label(edge.src).display
        obj = graph.entity_label(edge.dst).display
        rows.append(
            (
                relation_item_id(edge.src, edge.predicate, edge.dst),
                relation_text(subject, edge.predicate, obj),
                KIND_RELATION,
            )
        )
    embeddable = [row for row in rows if row[1].replace("_", " ").split()]
    skipped = len(rows) - len(embeddable)
    vectors = embedder.embed_batch([text for _, text, _ in embeddable])
    for (item_id, _, kind), vec in zip(embeddable, vectors):
        index.insert(item_id, vec, kind)
    return index, skipped
