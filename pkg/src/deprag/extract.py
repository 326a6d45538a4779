"""Heuristic subject-relation-object extraction over dependency trees.

Five rules fire in a fixed order per governing predicate:

  active        nsubj + obj around a verb
  prepositional case-marked obl/nmod attached to the verb, anchored to the
                clause's object when one exists, else its subject
  passive       nsubj:pass clauses; a "by"-agent swaps into subject position,
                otherwise the surface subject keeps its slot and the
                complement's preposition suffixes the relation
  copula        non-verbal predicate with a cop dependent -> literal "is"
  conjunction   conj dependents of a subject or object inherit the other two
                slots of each triple their conjunct head appears in

Entity strings come from noun-chunk spans; a chunk's nmod dependent whose
case marker is "for"/"of" is folded into the entity name (so a product name
like "Joule for Consultants" stays one node), while other verb-attached
prepositional phrases become relation suffixes. Relations use the verb's
lowercased lemma plus any particle; a "not" advmod prefixes the relation
with "not_" to preserve polarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .conllu import (
    NOMINAL_UPOS,
    ParsedSentence,
    Token,
    chunk_span,
    deprel_subtype,
)
from .errors import EngineError
from .normalize import EmptyAfterNormalization, normalize_label

FOLDED_CASE_LEMMAS = frozenset({"for", "of"})
NEGATION_LEMMAS = frozenset({"not", "n't"})

_RULE_ORDER = {
    "active": 0,
    "prepositional": 1,
    "passive": 2,
    "copula": 3,
    "conjunction": 4,
}


class EmptyAfterCleaning(EngineError):
    """A noun-phrase span reduced to nothing (only determiners/punctuation)."""


@dataclass(frozen=True)
class Triple:
    subject: str
    relation: str
    object: str
    sent_id: str
    chunk_id: str
    rule: str


class TripleExtractor(Protocol):
    """Seam for alternative extraction backends (e.g. an LLM extractor)."""

    def extract(self, sent: ParsedSentence, chunk_id: str) -> list[Triple]: ...


def clean_noun_phrase(span: list[Token]) -> str:
    """Join a token span into an entity string.

    Leading determiners and all punctuation tokens are dropped; remaining
    forms are joined with '_' preserving their casing.
    """
    if not span:
        raise EmptyAfterCleaning("empty span")
    tokens = list(span)
    while tokens and tokens[0].base == "det":
        tokens.pop(0)
    tokens = [t for t in tokens if t.upos != "PUNCT"]
    if not tokens:
        raise EmptyAfterCleaning(
            "span reduced to nothing: " + " ".join(t.form for t in span)
        )
    return "_".join(t.form for t in tokens)


def _case_marker(sent: ParsedSentence, index: int) -> str | None:
    markers = [t for t in sent.children(index) if t.base in ("case", "mark")]
    return markers[0].lemma.lower() if markers else None


def _np_tokens(sent: ParsedSentence, index: int) -> list[Token]:
    """Noun-chunk tokens for a nominal, with for/of nmod phrases folded in."""
    parts = list(chunk_span(sent, index))
    for dep in sent.children(index):
        if dep.base != "nmod" or dep.upos not in NOMINAL_UPOS:
            continue
        marker = [t for t in sent.children(dep.index) if t.base == "case"]
        if marker and marker[0].lemma.lower() in FOLDED_CASE_LEMMAS:
            parts.append(marker[0])
            parts.extend(_np_tokens(sent, dep.index))
    seen: set[int] = set()
    ordered = []
    for t in sorted(parts, key=lambda t: t.index):
        if t.index not in seen:
            seen.add(t.index)
            ordered.append(t)
    return ordered


def _np_or_adj_tokens(sent: ParsedSentence, index: int) -> list[Token]:
    tok = sent.tokens[index - 1]
    if tok.upos in NOMINAL_UPOS:
        return _np_tokens(sent, index)
    return [tok]


def _relation(sent: ParsedSentence, verb_index: int) -> str:
    verb = sent.tokens[verb_index - 1]
    parts = [verb.lemma.lower()]
    for dep in sent.children(verb_index):
        if dep.base == "prt" or (
            dep.base == "compound" and deprel_subtype(dep.deprel) == "prt"
        ):
            parts.append(dep.lemma.lower())
    rel = "_".join(parts)
    if _is_negated(sent, verb_index):
        rel = "not_" + rel
    return rel


def _is_negated(sent: ParsedSentence, index: int) -> bool:
    return any(
        d.base == "advmod" and d.lemma.lower() in NEGATION_LEMMAS
        for d in sent.children(index)
    )


@dataclass(frozen=True)
class _Candidate:
    anchor_index: int  # governing predicate position, for emission order
    rule: str
    subject_index: int
    relation: str
    object_index: int
    seq: int


def _clause_candidates(sent: ParsedSentence) -> list[_Candidate]:
    candidates: list[_Candidate] = []
    seq = 0

    def add(anchor: int, rule: str, s: int, rel: str, o: int) -> None:
        nonlocal seq
        candidates.append(_Candidate(anchor, rule, s, rel, o, seq))
        seq += 1

    for verb in sent.tokens:
        if verb.upos != "VERB":
            continue
        deps = sent.children(verb.index)
        subjects = [
            d for d in deps if d.base == "nsubj" and deprel_subtype(d.deprel) != "pass"
        ]
        passive_subjects = [
            d for d in deps if d.base == "nsubj" and deprel_subtype(d.deprel) == "pass"
        ]
        objects = [d for d in deps if d.base == "obj"]
        obliques = [
            d
            for d in deps
            if d.base in ("obl", "nmod") and _case_marker(sent, d.index) is not None
        ]
        rel = _relation(sent, verb.index)

        for s in subjects:
            for o in objects:
                add(verb.index, "active", s.index, rel, o.index)

        if not passive_subjects:
            anchor = objects[0] if objects else (subjects[0] if subjects else None)
            if anchor is not None:
                for o in obliques:
                    marker = _case_marker(sent, o.index)
                    add(
                        verb.index,
                        "prepositional",
                        anchor.index,
                        f"{rel}_{marker}",
                        o.index,
                    )

        for s in passive_subjects:
            agents = [
                o for o in obliques if _case_marker(sent, o.index) == "by"
            ]
            if agents:
                for agent in agents:
                    add(verb.index, "passive", agent.index, rel, s.index)
            else:
                complements = [d for d in deps if d.base == "xcomp"] + [
                    o for o in obliques
                ]
                for comp in sorted(complements, key=lambda t: t.index):
                    marker = _case_marker(sent, comp.index)
                    comp_rel = f"{rel}_{marker}" if marker else rel
                    add(verb.index, "passive", s.index, comp_rel, comp.index)

    # Copular clauses: the predicate is the tree position, not a verb.
    for pred in sent.tokens:
        if pred.upos == "VERB":
            continue
        deps = sent.children(pred.index)
        if not any(d.base == "cop" for d in deps):
            continue
        subjects = [
            d for d in deps if d.base == "nsubj" and deprel_subtype(d.deprel) != "pass"
        ]
        rel = "not_is" if _is_negated(sent, pred.index) else "is"
        for s in subjects:
            add(pred.index, "copula", s.index, rel, pred.index)

    # Conjunction distribution over the candidates gathered so far.
    for cand in list(candidates):
        for conj in sent.children(cand.subject_index):
            if conj.base == "conj":
                add(
                    cand.anchor_index,
                    "conjunction",
                    conj.index,
                    cand.relation,
                    cand.object_index,
                )
        for conj in sent.children(cand.object_index):
            if conj.base == "conj":
                add(
                    cand.anchor_index,
                    "conjunction",
                    cand.subject_index,
                    cand.relation,
                    conj.index,
                )
    return candidates


def extract_triples(sent: ParsedSentence, chunk_id: str = "") -> list[Triple]:
    """Apply the rule set to one parsed sentence.

    Candidates whose entity spans clean away, or whose subject and object
    normalize to the same key, are dropped. Output order is deterministic:
    governing predicate position, then rule precedence, then generation
    order.
    """
    triples: list[Triple] = []
    candidates = sorted(
        _clause_candidates(sent),
        key=lambda c: (c.anchor_index, _RULE_ORDER[c.rule], c.seq),
    )
    for cand in candidates:
        try:
            subject = clean_noun_phrase(_np_tokens(sent, cand.subject_index))
            obj = clean_noun_phrase(_np_or_adj_tokens(sent, cand.object_index))
            skey = normalize_label(subject).key
            okey = normalize_label(obj).key
            normalize_label(cand.relation)
        except (EmptyAfterCleaning, EmptyAfterNormalization):
            continue
        if skey == okey:
            continue
        triples.append(
            Triple(
                subject=subject,
                relation=cand.relation,
                object=obj,
                sent_id=sent.sent_id,
                chunk_id=chunk_id,
                rule=cand.rule,
            )
        )
    return triples


class DependencyTripleExtractor:
    """Default extractor: the dependency rule set above."""

    def extract(self, sent: ParsedSentence, chunk_id: str) -> list[Triple]:
        return extract_triples(sent, chunk_id)
