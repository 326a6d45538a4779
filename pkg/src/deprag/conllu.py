"""CoNLL-U parsing into validated dependency trees, plus the syntactic
queries (subtree spans, noun chunks) the triple extractor relies on.

The ten-column UD v2 layout is the ingestion contract: any external parser
that writes CoNLL-U can feed the engine. Multiword-token ranges ("3-4") and
empty nodes ("3.1") are skipped. A handful of legacy labels are
canonicalized to UD base forms at ingestion so parsers with older
inventories (dobj, nsubjpass) interoperate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import EngineError

# Legacy / SD-style labels mapped onto UD v2 at ingestion.
LABEL_CANONICALIZATION = {
    "dobj": "obj",
    "nsubjpass": "nsubj:pass",
    "auxpass": "aux:pass",
    "csubjpass": "csubj:pass",
}

NOMINAL_UPOS = ("NOUN", "PROPN")

# Dependent relations folded into a noun chunk around its head.
CHUNK_DEPRELS = frozenset({"det", "amod", "compound", "nummod", "flat"})

# A nominal that hangs off another nominal via one of these is not a chunk
# head of its own; it surfaces inside the governing chunk instead.
CHUNK_ABSORBED_DEPRELS = frozenset({"compound", "flat", "amod"})


class MalformedLine(EngineError):
    """A token line that cannot be parsed (column count, non-integer fields)."""


class InvalidTree(EngineError):
    """A sentence whose head references do not form a single rooted tree."""


class IndexOutOfRange(EngineError):
    pass


def deprel_base(label: str) -> str:
    """The UD relation without its subtype: 'nsubj:pass' -> 'nsubj'."""
    return label.split(":", 1)[0]


def deprel_subtype(label: str) -> str:
    parts = label.split(":", 1)
    return parts[1] if len(parts) == 2 else ""


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str

    @property
    def base(self) -> str:
        return deprel_base(self.deprel)


@dataclass(frozen=True)
class ParsedSentence:
    sent_id: str
    tokens: tuple[Token, ...]
    root_index: int

    def token(self, index: int) -> Token:
        if not 1 <= index <= len(self.tokens):
            raise IndexOutOfRange(
                f"{self.sent_id}: token index {index} outside 1..{len(self.tokens)}"
            )
        return self.tokens[index - 1]

    def children(self, index: int) -> list[Token]:
        return [t for t in self.tokens if t.head == index]

    @property
    def text(self) -> str:
        return " ".join(t.form for t in self.tokens)


def _canonical_deprel(label: str) -> str:
    return LABEL_CANONICALIZATION.get(label, label)


def _parse_block(
    lines: list[tuple[int, str]], position: int
) -> ParsedSentence:
    sent_id: str | None = None
    tokens: list[Token] = []
    for lineno, line in lines:
        if line.startswith("#"):
            comment = line[1:].strip()
            if comment.startswith("sent_id") and "=" in comment:
                sent_id = comment.split("=", 1)[1].strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise MalformedLine(
                f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}"
            )
        raw_id = cols[0]
        if "-" in raw_id or "." in raw_id:
            # Multiword-token range or empty node: not part of the basic tree.
            continue
        try:
            index = int(raw_id)
        except ValueError as exc:
            raise MalformedLine(f"line {lineno}: non-integer token id {raw_id!r}") from exc
        try:
            head = int(cols[6])
        except ValueError as exc:
            raise MalformedLine(f"line {lineno}: non-integer head {cols[6]!r}") from exc
        form = cols[1]
        lemma = cols[2] if cols[2] != "_" else form
        tokens.append(
            Token(
                index=index,
                form=form,
                lemma=lemma,
                upos=cols[3],
                head=head,
                deprel=_canonical_deprel(cols[7]),
            )
        )
    resolved_id = sent_id if sent_id is not None else str(position)
    return _validate_tree(resolved_id, tokens)


def _validate_tree(sent_id: str, tokens: list[Token]) -> ParsedSentence:
    n = len(tokens)
    if n == 0:
        raise InvalidTree(f"{sent_id}: sentence block has no tokens")
    for i, tok in enumerate(tokens, start=1):
        if tok.index != i:
            raise InvalidTree(
                f"{sent_id}: token indices not consecutive (expected {i}, got {tok.index})"
            )
        if tok.head == tok.index:
            raise InvalidTree(f"{sent_id}: token {tok.index} is its own head")
        if not 0 <= tok.head <= n:
            raise InvalidTree(
                f"{sent_id}: token {tok.index} head {tok.head} outside 0..{n}"
            )
    roots = [t.index for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise InvalidTree(f"{sent_id}: expected exactly one root, found {len(roots)}")
    root = roots[0]
    # Walk down from the root; a cycle leaves some node unreached.
    children: dict[int, list[int]] = {}
    for t in tokens:
        children.setdefault(t.head, []).append(t.index)
    reached: set[int] = set()
    stack = [root]
    while stack:
        idx = stack.pop()
        if idx in reached:
            continue
        reached.add(idx)
        stack.extend(children.get(idx, []))
    if len(reached) != n:
        unreached = sorted(set(range(1, n + 1)) - reached)
        raise InvalidTree(
            f"{sent_id}: cycle or unreachable tokens {unreached} (not a tree)"
        )
    return ParsedSentence(sent_id=sent_id, tokens=tuple(tokens), root_index=root)


def parse_conllu(text: str) -> list[ParsedSentence]:
    """Parse CoNLL-U text into validated sentences.

    Sentence ids come from "# sent_id = ..." comments when present, else
    from the 1-based block position. Comment-only blocks (a parser's way of
    flagging a sentence it could not analyze) are skipped.
    """
    sentences: list[ParsedSentence] = []
    block: list[tuple[int, str]] = []
    position = 0

    def flush() -> None:
        nonlocal position, block
        if any(not line.startswith("#") for _, line in block):
            position += 1
            sentences.append(_parse_block(block, position))
        block = []

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if line.strip() == "":
            flush()
            continue
        block.append((lineno, line))
    flush()
    return sentences


def to_conllu(sent: ParsedSentence) -> str:
    """Serialize a sentence back to CoNLL-U (unused columns as '_')."""
    lines = [f"# sent_id = {sent.sent_id}"]
    for t in sent.tokens:
        lines.append(
            "\t".join(
                [
                    str(t.index),
                    t.form,
                    t.lemma,
                    t.upos,
                    "_",
                    "_",
                    str(t.head),
                    t.deprel,
                    "_",
                    "_",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_conllu(sentences: Iterable[ParsedSentence]) -> str:
    return "\n".join(to_conllu(s) for s in sentences)


def subtree_span(sent: ParsedSentence, index: int) -> list[Token]:
    """All tokens transitively headed by ``index`` plus itself, surface order."""
    sent.token(index)
    children: dict[int, list[int]] = {}
    for t in sent.tokens:
        children.setdefault(t.head, []).append(t.index)
    selected: set[int] = set()
    stack = [index]
    while stack:
        idx = stack.pop()
        if idx in selected:
            continue
        selected.add(idx)
        stack.extend(children.get(idx, []))
    return [sent.tokens[i - 1] for i in sorted(selected)]


def chunk_span(sent: ParsedSentence, head_index: int) -> list[Token]:
    """The contiguous determiner/modifier/compound run around a nominal head.

    Only direct dependents with a chunk relation qualify, and the span is
    truncated to the contiguous run touching the head so the emitted entity
    stays a substring of the sentence.
    """
    head = sent.token(head_index)
    qualifying = {
        t.index
        for t in sent.tokens
        if t.head == head_index and t.base in CHUNK_DEPRELS
    }
    lo = head_index
    while lo - 1 in qualifying:
        lo -= 1
    hi = head_index
    while hi + 1 in qualifying:
        hi += 1
    return [sent.tokens[i - 1] for i in range(lo, hi + 1)]


def noun_chunks(sent: ParsedSentence) -> list[tuple[int, list[Token]]]:
    """(head index, token span) pairs for every nominal chunk head.

    A NOUN/PROPN token heads a chunk unless it is absorbed into another
    nominal via compound/flat/amod; pronouns never head chunks. Spans are
    pairwise disjoint and sorted by position.
    """
    chunks: list[tuple[int, list[Token]]] = []
    for tok in sent.tokens:
        if tok.upos not in NOMINAL_UPOS:
            continue
        if tok.base in CHUNK_ABSORBED_DEPRELS and tok.head != 0:
            governor = sent.tokens[tok.head - 1]
            if governor.upos in NOMINAL_UPOS:
                continue
        chunks.append((tok.index, chunk_span(sent, tok.index)))
    return chunks
