"""Sentence segmentation, sliding-window batching, and the verb filter.

Segmentation splits on '.', '!', '?' followed by whitespace (or end of
text), with two exceptions that keep common false boundaries intact: the
token before the delimiter is a known abbreviation, or it is a single
uppercase letter (an initial). Windows group consecutive sentences for
provenance; extraction itself stays per-sentence.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conllu import ParsedSentence
from .ingest import Chunk

DEFAULT_ABBREVIATIONS = frozenset(
    {"e.g", "i.e", "etc", "dr", "mr", "ms", "vs", "no", "fig"}
)

DEFAULT_WINDOW_SIZE = 3
DEFAULT_WINDOW_OVERLAP = 1

_TERMINATORS = ".!?"
_OPENERS = "([{\"'“‘"


@dataclass(frozen=True)
class SentenceRecord:
    sent_id: str
    text: str
    chunk_id: str


@dataclass(frozen=True)
class WindowBatch:
    sentences: tuple[SentenceRecord, ...]
    window_index: int


def _token_before(text: str, pos: int) -> str:
    """The whitespace-delimited token ending just before text[pos]."""
    j = pos
    while j > 0 and not text[j - 1].isspace():
        j -= 1
    return text[j:pos].lstrip(_OPENERS)


def _is_boundary(text: str, pos: int, abbreviations: frozenset[str]) -> bool:
    if text[pos] not in _TERMINATORS:
        return False
    if pos + 1 < len(text) and not text[pos + 1].isspace():
        return False
    if text[pos] == ".":
        token = _token_before(text, pos)
        if token.lower() in abbreviations:
            return False
        if len(token) == 1 and token.isupper():
            return False
    return True


def split_sentences(
    text: str, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
) -> list[str]:
    """Split raw text into sentence strings, delimiters attached."""
    sentences: list[str] = []
    start = 0
    for pos in range(len(text)):
        if _is_boundary(text, pos, abbreviations):
            piece = text[start : pos + 1].strip()
            if piece:
                sentences.append(piece)
            start = pos + 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def segment_sentences(
    chunk: Chunk, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
) -> list[SentenceRecord]:
    return [
        SentenceRecord(sent_id=f"{chunk.chunk_id}@{i}", text=s, chunk_id=chunk.chunk_id)
        for i, s in enumerate(split_sentences(chunk.text, abbreviations))
    ]


def window_batches(
    sentences: list[SentenceRecord],
    window_size: int = DEFAULT_WINDOW_SIZE,
    window_overlap: int = DEFAULT_WINDOW_OVERLAP,
) -> list[WindowBatch]:
    """Group sentences into sliding windows of ``window_size`` with
    ``window_overlap`` shared sentences between consecutive windows.

    The final window may be shorter; it is emitted only when it contains at
    least one sentence not already covered.
    """
    if not 0 <= window_overlap < window_size:
        raise ValueError(
            f"require 0 <= window_overlap < window_size, got {window_overlap}/{window_size}"
        )
    stride = window_size - window_overlap
    batches: list[WindowBatch] = []
    covered = 0
    i = 0
    while covered < len(sentences):
        lo = i * stride
        hi = min(lo + window_size, len(sentences))
        if hi > covered:
            batches.append(WindowBatch(tuple(sentences[lo:hi]), window_index=i))
            covered = hi
        i += 1
    return batches


def contains_verb(parsed: ParsedSentence) -> bool:
    """True when the parse contains a VERB or AUX token.

    AUX counts so copular statements ("X is incompatible") survive the
    content filter; they carry relations the extractor handles.
    """
    return any(tok.upos in ("VERB", "AUX") for tok in parsed.tokens)
