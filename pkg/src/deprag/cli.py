"""Operator CLI: build, query, stats, cost, and eval subcommands driven by a
single JSON config file.

Exit codes: 0 success, 1 usage error, 2 data error. Standard output carries
only the result document; progress and diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from dataclasses import dataclass, field, replace

from . import conllu, cost, evaluation, ingest, sentence
from .embed import EmbedConfig, VectorIndex, index_graph, make_embedder
from .errors import EngineError
from .extract import Triple, extract_triples
from .graph import KnowledgeGraph
from .normalize import Schema, dedupe_triples, normalize_label, NormalizedTriple
from .retrieve import RetrievalConfig, retrieve
from .sidecar_client import SidecarError, run_sidecar


class ConfigError(EngineError):
    pass


@dataclass
class EngineConfig:
    corpus_dir: str | None = None
    corpus_manifest: str | None = None
    max_chunk_size: int = ingest.DEFAULT_MAX_CHUNK_SIZE
    chunk_overlap: int = ingest.DEFAULT_CHUNK_OVERLAP
    window_size: int = sentence.DEFAULT_WINDOW_SIZE
    window_overlap: int = sentence.DEFAULT_WINDOW_OVERLAP
    abbreviations: frozenset[str] = sentence.DEFAULT_ABBREVIATIONS
    schema_path: str | None = None
    embedding: EmbedConfig = field(default_factory=EmbedConfig)
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    graph_path: str = "graph.jsonl"
    index_path: str = "index.jsonl"
    parses_dir: str | None = None
    sidecar_command: list[str] | None = None

    @classmethod
    def from_file(cls, path: str) -> "EngineConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {path}: {exc}") from exc
        return cls.from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))

    @classmethod
    def from_dict(cls, data: dict, base_dir: str = ".") -> "EngineConfig":
        def resolve(p: str | None) -> str | None:
            if p is None:
                return None
            return p if os.path.isabs(p) else os.path.join(base_dir, p)

        corpus = data.get("corpus", {})
        chunking = data.get("chunking", {})
        window = data.get("window", {})
        cfg = cls(
            corpus_dir=resolve(corpus.get("dir")),
            corpus_manifest=resolve(corpus.get("manifest")),
            max_chunk_size=int(chunking.get("max_size", ingest.DEFAULT_MAX_CHUNK_SIZE)),
            chunk_overlap=int(chunking.get("overlap", ingest.DEFAULT_CHUNK_OVERLAP)),
            window_size=int(window.get("size", sentence.DEFAULT_WINDOW_SIZE)),
            window_overlap=int(window.get("overlap", sentence.DEFAULT_WINDOW_OVERLAP)),
            abbreviations=frozenset(
                a.lower() for a in data.get("abbreviations", sentence.DEFAULT_ABBREVIATIONS)
            ),
            schema_path=resolve(data.get("schema_path")),
            embedding=EmbedConfig(**data.get("embedding", {})),
            retrieval=RetrievalConfig(**data.get("retrieval", {})),
            graph_path=resolve(data.get("graph_path", "graph.jsonl")),
            index_path=resolve(data.get("index_path", "index.jsonl")),
            parses_dir=resolve(data.get("parses_dir")),
            sidecar_command=data.get("sidecar_command"),
        )
        return cfg

    def resolved_parses_dir(self) -> str | None:
        if self.parses_dir:
            return self.parses_dir
        if self.corpus_dir:
            return os.path.join(self.corpus_dir, "parses")
        if self.corpus_manifest:
            return os.path.join(os.path.dirname(self.corpus_manifest), "parses")
        return None


@dataclass
class _DocResult:
    doc_id: str
    chunks: list[ingest.Chunk]
    sentence_count: int
    window_count: int
    filtered_no_verb: int
    without_parse: int
    parse_source: str  # "file" | "sidecar" | "none"
    triples: list[Triple]


def _build_document(doc: ingest.RawDocument, cfg: EngineConfig) -> _DocResult:
    chunks = ingest.hybrid_chunk(doc, cfg.max_chunk_size, cfg.chunk_overlap)
    records: list[sentence.SentenceRecord] = []
    window_count = 0
    for chunk in chunks:
        chunk_sentences = sentence.segment_sentences(chunk, cfg.abbreviations)
        window_count += len(
            sentence.window_batches(chunk_sentences, cfg.window_size, cfg.window_overlap)
        )
        records.extend(chunk_sentences)

    parses: dict[str, conllu.ParsedSentence] = {}
    parse_source = "none"
    parses_dir = cfg.resolved_parses_dir()
    parse_file = os.path.join(parses_dir, f"{doc.doc_id}.conllu") if parses_dir else None
    if parse_file and os.path.exists(parse_file):
        with open(parse_file, encoding="utf-8") as fh:
            for parsed in conllu.parse_conllu(fh.read()):
                parses[parsed.sent_id] = parsed
        parse_source = "file"
    elif cfg.sidecar_command and records:
        for parsed in run_sidecar(
            cfg.sidecar_command, [(r.sent_id, r.text) for r in records]
        ):
            parses[parsed.sent_id] = parsed
        parse_source = "sidecar"
    elif records:
        return _DocResult(doc.doc_id, chunks, len(records), window_count, 0, len(records), "none", [])

    filtered = 0
    without_parse = 0
    triples: list[Triple] = []
    for record in records:
        parsed = parses.get(record.sent_id)
        if parsed is None:
            without_parse += 1
            continue
        if not sentence.contains_verb(parsed):
            filtered += 1
            continue
        triples.extend(extract_triples(parsed, record.chunk_id))
    return _DocResult(
        doc.doc_id,
        chunks,
        len(records),
        window_count,
        filtered,
        without_parse,
        parse_source,
        triples,
    )


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_build(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    paths = ingest.discover_corpus(cfg.corpus_dir, cfg.corpus_manifest)
    if not paths:
        raise EngineError("corpus is empty: no .md or .txt documents found")
    docs = ingest.load_corpus(paths)
    _log(f"building from {len(docs)} document(s)")

    jobs = max(1, args.jobs)
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_build_document, docs, [cfg] * len(docs)))
    else:
        results = [_build_document(doc, cfg) for doc in docs]

    unparsed_docs = [r.doc_id for r in results if r.parse_source == "none" and r.sentence_count]
    if unparsed_docs and not cfg.sidecar_command:
        raise EngineError(
            "no parses available for document(s): "
            + ", ".join(unparsed_docs)
            + f" (expected CoNLL-U under {cfg.resolved_parses_dir()!r} "
            "or a configured sidecar_command)"
        )

    schema = Schema.load(cfg.schema_path) if cfg.schema_path else Schema()
    chunk_texts = {
        c.chunk_id: c.text for result in results for c in result.chunks
    }

    graph = KnowledgeGraph()
    # Every chunk is a first-class node so dense retrieval covers the whole
    # corpus; mention edges attach only where triples reference a chunk.
    for result in results:
        for c in result.chunks:
            graph.ensure_chunk(c.chunk_id, c.text)

    all_triples: list[Triple] = []
    kept = 0
    for result in results:
        for t in result.triples:
            all_triples.append(t)
            nt = _normalize_one(t)
            if not schema.is_empty and not (
                schema.allows_relation(nt.relation.key)
                and schema.allows_entity(nt.subject.key)
                and schema.allows_entity(nt.object.key)
            ):
                continue
            kept += 1
            graph.insert_triple(
                nt,
                chunk_id=t.chunk_id,
                chunk_text=chunk_texts.get(t.chunk_id, ""),
                occurrences=1,
                sent_ids=[t.sent_id],
            )

    embedder = make_embedder(cfg.embedding)
    index, skipped_embeddings = index_graph(graph, embedder)

    graph.serialize(cfg.graph_path)
    index.serialize(cfg.index_path)

    unique = dedupe_triples(all_triples)
    stats = graph.degree_stats()
    report = {
        "documents": len(docs),
        "chunks": sum(len(r.chunks) for r in results),
        "sentences": sum(r.sentence_count for r in results),
        "windows": sum(r.window_count for r in results),
        "sentences_filtered_no_verb": sum(r.filtered_no_verb for r in results),
        "sentences_without_parse": sum(r.without_parse for r in results),
        "triples_extracted": len(all_triples),
        "triples_after_schema": kept,
        "unique_triples": len(unique),
        "dedupe_ratio": (len(unique) / len(all_triples)) if all_triples else 0.0,
        "index_items": len(index.entries),
        "embeddings_skipped": skipped_embeddings,
        **stats,
        "graph_path": cfg.graph_path,
        "index_path": cfg.index_path,
    }
    print(json.dumps(report, indent=2))
    return 0


def _normalize_one(t: Triple) -> NormalizedTriple:
    return NormalizedTriple(
        subject=normalize_label(t.subject),
        relation=normalize_label(t.relation),
        object=normalize_label(t.object),
        count=1,
        provenance=((t.chunk_id, t.sent_id),),
    )


def _load_artifacts(cfg: EngineConfig) -> tuple[KnowledgeGraph, VectorIndex]:
    if not os.path.exists(cfg.graph_path):
        raise EngineError(f"graph artifact missing: {cfg.graph_path} (run build first)")
    if not os.path.exists(cfg.index_path):
        raise EngineError(f"index artifact missing: {cfg.index_path} (run build first)")
    return KnowledgeGraph.load(cfg.graph_path), VectorIndex.load(cfg.index_path)


def cmd_query(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    graph, index = _load_artifacts(cfg)
    embedder = make_embedder(cfg.embedding)

    parsed_query = None
    if cfg.sidecar_command:
        try:
            parses = run_sidecar(cfg.sidecar_command, [("query", args.q)])
            parsed_query = parses[0] if parses else None
        except SidecarError as exc:
            _log(f"sidecar parse failed, falling back to guesser: {exc}")

    context = retrieve(args.q, graph, index, embedder, cfg.retrieval, parsed_query)
    diag = context.diagnostics
    if diag.used_fallback_guesser:
        _log("entity identification used the fallback noun-phrase guesser")
    if diag.degraded_dense_only:
        _log("no seed entities found; returning dense-only context")
    if diag.missing_embeddings:
        _log(f"{diag.missing_embeddings} candidate(s) lacked index embeddings")
    if args.format == "text":
        print(context.render_text())
    else:
        print(json.dumps(context.to_dict(), indent=2, ensure_ascii=False))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if not os.path.exists(cfg.graph_path):
        raise EngineError(f"graph artifact missing: {cfg.graph_path} (run build first)")
    graph = KnowledgeGraph.load(cfg.graph_path)
    print(json.dumps(graph.degree_stats(), indent=2))
    return 0


def cmd_cost(args: argparse.Namespace) -> int:
    model = cost.CostModel.load(args.model)
    print(cost.format_table(model))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    records = evaluation.read_score_file(args.scores)
    metrics = evaluation.weighted_coverage(records)
    print(json.dumps(metrics, indent=2))
    return 0


def _load_config(args: argparse.Namespace) -> EngineConfig:
    cfg = EngineConfig.from_file(args.config)
    # Flag overrides, one-for-one with config keys.
    if getattr(args, "graph", None):
        cfg.graph_path = args.graph
    if getattr(args, "index", None):
        cfg.index_path = args.index
    if getattr(args, "max_size", None):
        cfg.max_chunk_size = args.max_size
    if getattr(args, "overlap", None) is not None:
        cfg.chunk_overlap = args.overlap
    if getattr(args, "hybrid", None) is not None:
        cfg.retrieval = replace(cfg.retrieval, hybrid=args.hybrid)
    if getattr(args, "top_k", None):
        cfg.retrieval = replace(cfg.retrieval, top_k_chunks=args.top_k)
    if getattr(args, "rng_seed", None) is not None:
        cfg.retrieval = replace(cfg.retrieval, rng_seed=args.rng_seed)
    return cfg


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 1 (not 2) on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _make_parser() -> _Parser:
    parser = _Parser(prog="deprag", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_config_flags(p: _Parser) -> None:
        p.add_argument("--config", required=True, help="engine config JSON path")
        p.add_argument("--graph", help="override graph artifact path")
        p.add_argument("--index", help="override index artifact path")

    p_build = sub.add_parser("build", help="construct the graph and index artifacts")
    add_config_flags(p_build)
    p_build.add_argument("--jobs", type=int, default=1, help="per-document parallelism")
    p_build.add_argument("--max-size", type=int, dest="max_size")
    p_build.add_argument("--overlap", type=int)
    p_build.set_defaults(func=cmd_build)

    p_query = sub.add_parser("query", help="run retrieval against built artifacts")
    add_config_flags(p_query)
    p_query.add_argument("--q", required=True, help="the query text")
    p_query.add_argument("--format", choices=("json", "text"), default="json")
    p_query.add_argument("--hybrid", action=argparse.BooleanOptionalAction, default=None)
    p_query.add_argument("--top-k", type=int, dest="top_k")
    p_query.add_argument("--rng-seed", type=int, dest="rng_seed")
    p_query.set_defaults(func=cmd_query)

    p_stats = sub.add_parser("stats", help="print graph statistics")
    add_config_flags(p_stats)
    p_stats.set_defaults(func=cmd_stats)

    p_cost = sub.add_parser("cost", help="estimate LLM construction cost")
    p_cost.add_argument("--model", required=True, help="cost model JSON path")
    p_cost.set_defaults(func=cmd_cost)

    p_eval = sub.add_parser("eval", help="aggregate coverage judgments")
    p_eval.add_argument("--scores", required=True, help="item_id<TAB>score file")
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except EngineError as exc:
        _log(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
