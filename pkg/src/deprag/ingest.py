"""Document ingestion: header-first markdown splitting, then character-level
chunking with overlap.

Documents are split at ATX headers ('#' x 1-6 followed by a space at line
start) into sections that keep their header line, so concatenating section
texts reconstructs the document. Sections larger than ``max_size`` are cut
with a recursive splitter that prefers coarse separators ("\\n\\n", "\\n",
" ") and falls back to fixed-stride cuts, carrying ``overlap`` trailing
characters into the next piece.

All offsets refer to positions in the original document text; chunk text is
always the raw substring ``doc.text[char_start:char_end]`` so that any
document can be reconstructed from its chunk intervals.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, TextIO

from .errors import EngineError

SEPARATORS = ("\n\n", "\n", " ")

DEFAULT_MAX_CHUNK_SIZE = 2048
DEFAULT_CHUNK_OVERLAP = 200

CORPUS_EXTENSIONS = (".md", ".txt")


class DocumentFormat(str, Enum):
    MARKDOWN = "markdown"
    PLAIN = "plain"


class CorpusError(EngineError):
    """Raised for unreadable corpora or duplicate document ids."""


@dataclass(frozen=True)
class RawDocument:
    doc_id: str
    text: str
    format: DocumentFormat = DocumentFormat.MARKDOWN

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise CorpusError("document id must be non-empty")


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    text: str
    doc_id: str
    char_start: int
    char_end: int
    section_path: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.char_end - self.char_start != len(self.text):
            raise ValueError(
                f"chunk {self.chunk_id}: interval [{self.char_start}, {self.char_end}) "
                f"does not match text length {len(self.text)}"
            )


@dataclass(frozen=True)
class Section:
    path: tuple[str, ...]
    text: str
    start: int


def _header_level(line: str) -> int | None:
    """Return the ATX header level of a line, or None if it is not a header."""
    i = 0
    while i < len(line) and line[i] == "#":
        i += 1
    if 1 <= i <= 6 and i < len(line) and line[i] == " ":
        return i
    return None


def split_markdown_sections(doc: RawDocument) -> list[Section]:
    """Split a document into header-delimited sections.

    Each section keeps its own header line so that concatenating the section
    texts in order reproduces ``doc.text`` exactly. The section path is the
    stack of enclosing header titles; a level-n header pops every entry of
    level >= n before pushing its own title.

    Plain-format documents yield a single section with an empty path (even
    when the text is empty); markdown documents with no content yield no
    sections.
    """
    if doc.format is DocumentFormat.PLAIN:
        return [Section((), doc.text, 0)]
    if not doc.text:
        return []

    sections: list[Section] = []
    # Stack of (level, title) pairs for the current header hierarchy.
    stack: list[tuple[int, str]] = []
    cur_start = 0
    cur_path: tuple[str, ...] = ()
    pos = 0
    text = doc.text
    while pos < len(text):
        nl = text.find("\n", pos)
        line_end = len(text) if nl == -1 else nl + 1
        line = text[pos:line_end]
        level = _header_level(line.rstrip("\n"))
        if level is not None:
            if pos > cur_start:
                sections.append(Section(cur_path, text[cur_start:pos], cur_start))
            while stack and stack[-1][0] >= level:
                stack.pop()
            title = line.rstrip("\n")[level + 1 :].strip()
            stack.append((level, title))
            cur_path = tuple(t for _, t in stack)
            cur_start = pos
        pos = line_end
    if len(text) > cur_start:
        sections.append(Section(cur_path, text[cur_start:], cur_start))
    return sections


def _separator_cut_positions(text: str, lo: int, hi: int, sep: str) -> list[int]:
    """Positions p in (lo, hi] such that text[p-len(sep):p] == sep.

    A cut after the separator keeps the separator attached to the piece that
    precedes it.
    """
    cuts = []
    start = lo
    while True:
        idx = text.find(sep, start, hi)
        if idx == -1:
            break
        cut = idx + len(sep)
        if lo < cut <= hi:
            cuts.append(cut)
        start = idx + 1
    return cuts


def _pick_end(text: str, start: int, hi: int, max_size: int) -> int:
    """End of the piece beginning at ``start``: the latest cut within budget.

    Prefers the coarsest separator that occurs inside the window; with no
    separator in the window the piece is hard-cut at exactly max_size.
    """
    if hi - start <= max_size:
        return hi
    window_hi = start + max_size
    for sep in SEPARATORS:
        cuts = _separator_cut_positions(text, start, window_hi, sep)
        if cuts:
            return cuts[-1]
    return window_hi


def _back_off(text: str, piece_start: int, piece_end: int, overlap: int) -> int:
    """Start of the next piece, ``overlap`` characters back when possible.

    The overlap is a target maximum: when a separator boundary exists inside
    the overlap window the next piece starts there instead of mid-word; with
    no boundary the raw target position is used.
    """
    if overlap == 0:
        return piece_end
    target = piece_end - overlap
    if target <= piece_start:
        # Piece no longer than the overlap: carrying it back would stall.
        return piece_end
    for q in range(target, piece_end):
        if text[q - 1] in ("\n", " "):
            return q
    return target


def chunk_section(
    section_text: str,
    max_size: int = DEFAULT_MAX_CHUNK_SIZE,
    overlap: int = DEFAULT_CHUNK_OVERLAP,
) -> list[tuple[str, int]]:
    """Split one section into pieces of at most ``max_size`` characters.

    Returns (text, local_start) pairs whose intervals cover every character
    of ``section_text``; consecutive pieces overlap by up to ``overlap``
    characters. A section already within the limit is returned whole; an
    empty section yields no pieces.
    """
    if not 0 <= overlap < max_size:
        raise ValueError(f"require 0 <= overlap < max_size, got {overlap}/{max_size}")
    n = len(section_text)
    if n == 0:
        return []
    pieces: list[tuple[str, int]] = []
    start = 0
    while start < n:
        end = _pick_end(section_text, start, n, max_size)
        pieces.append((section_text[start:end], start))
        if end >= n:
            break
        start = _back_off(section_text, start, end, overlap)
    return pieces


def hybrid_chunk(
    doc: RawDocument,
    max_size: int = DEFAULT_MAX_CHUNK_SIZE,
    overlap: int = DEFAULT_CHUNK_OVERLAP,
) -> list[Chunk]:
    """Header-first split composed with character-level chunking.

    Ordinals are assigned in document order across sections; overlap never
    crosses a section boundary.
    """
    chunks: list[Chunk] = []
    ordinal = 0
    for section in split_markdown_sections(doc):
        for text, local_start in chunk_section(section.text, max_size, overlap):
            start = section.start + local_start
            chunks.append(
                Chunk(
                    chunk_id=f"{doc.doc_id}#{ordinal}",
                    text=text,
                    doc_id=doc.doc_id,
                    char_start=start,
                    char_end=start + len(text),
                    section_path=section.path,
                )
            )
            ordinal += 1
    return chunks


def format_for_path(path: str) -> DocumentFormat:
    return DocumentFormat.MARKDOWN if path.endswith(".md") else DocumentFormat.PLAIN


def load_document(path: str, doc_id: str | None = None) -> RawDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CorpusError(f"cannot read document {path}: {exc}") from exc
    if doc_id is None:
        doc_id = os.path.splitext(os.path.basename(path))[0]
    return RawDocument(doc_id=doc_id, text=text, format=format_for_path(path))


def discover_corpus(root: str | None = None, manifest: str | None = None) -> list[str]:
    """Resolve corpus document paths from a directory walk or a manifest file.

    The manifest lists one path per line (relative paths resolve against the
    manifest's directory); the walk picks up .md and .txt files sorted by
    path for determinism.
    """
    if manifest is not None:
        try:
            with open(manifest, encoding="utf-8") as fh:
                lines = [ln.strip() for ln in fh]
        except OSError as exc:
            raise CorpusError(f"cannot read manifest {manifest}: {exc}") from exc
        base = os.path.dirname(os.path.abspath(manifest))
        return [
            p if os.path.isabs(p) else os.path.join(base, p)
            for p in lines
            if p and not p.startswith("#")
        ]
    if root is None:
        raise CorpusError("corpus requires either a directory or a manifest")
    found: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            if name.endswith(CORPUS_EXTENSIONS):
                found.append(os.path.join(dirpath, name))
    return found


def load_corpus(paths: Iterable[str]) -> list[RawDocument]:
    docs: list[RawDocument] = []
    seen: set[str] = set()
    for path in paths:
        doc = load_document(path)
        if doc.doc_id in seen:
            raise CorpusError(f"duplicate document id {doc.doc_id!r} (from {path})")
        seen.add(doc.doc_id)
        docs.append(doc)
    return docs


def write_chunk_records(chunks: Iterable[Chunk], out: TextIO) -> None:
    """Emit chunks as line-delimited JSON records for inspection.

    The text field is whitespace-trimmed for readability; char_start/char_end
    always delimit the raw untrimmed interval in the source document.
    """
    for chunk in chunks:
        record = {
            "chunk_id": chunk.chunk_id,
            "doc_id": chunk.doc_id,
            "char_start": chunk.char_start,
            "char_end": chunk.char_end,
            "section_path": list(chunk.section_path),
            "text": chunk.text.strip(),
        }
        out.write(json.dumps(record, ensure_ascii=False) + "\n")
