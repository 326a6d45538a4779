"""deprag: knowledge-graph construction from dependency parses and hybrid
graph+vector retrieval with LLM-ready context output."""

from .conllu import ParsedSentence, Token, parse_conllu
from .embed import VectorIndex, hash_embed
from .errors import EngineError
from .extract import Triple, extract_triples
from .graph import KnowledgeGraph
from .ingest import Chunk, RawDocument, hybrid_chunk
from .normalize import CanonicalLabel, Schema, normalize_label
from .retrieve import RetrievalConfig, RetrievalContext, retrieve

__all__ = [
    "CanonicalLabel",
    "Chunk",
    "EngineError",
    "KnowledgeGraph",
    "ParsedSentence",
    "RawDocument",
    "RetrievalConfig",
    "RetrievalContext",
    "Schema",
    "Token",
    "Triple",
    "VectorIndex",
    "extract_triples",
    "hash_embed",
    "hybrid_chunk",
    "normalize_label",
    "parse_conllu",
    "retrieve",
]

__version__ = "0.1.0"
