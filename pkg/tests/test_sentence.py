import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deprag.ingest import Chunk
from deprag.sentence import (
    SentenceRecord,
    contains_verb,
    segment_sentences,
    split_sentences,
    window_batches,
)


def make_chunk(text, chunk_id="d#0"):
    return Chunk(chunk_id, text, "d", 0, len(text), ())


class TestSplitSentences:
    def test_two_sentences(self):
        assert split_sentences("A works. B fails.") == ["A works.", "B fails."]

    def test_abbreviation_does_not_split(self):
        assert split_sentences("See Fig. 2 for details.") == ["See Fig. 2 for details."]

    def test_eg_with_internal_dot(self):
        assert split_sentences("Use tools, e.g. hammers, daily. Then rest.") == [
            "Use tools, e.g. hammers, daily.",
            "Then rest.",
        ]

    def test_single_initial_does_not_split(self):
        assert split_sentences("J. Smith wrote it. True story.") == [
            "J. Smith wrote it.",
            "True story.",
        ]

    def test_empty(self):
        assert split_sentences("") == []

    def test_question_and_bang(self):
        assert split_sentences("Really?! Yes. No?") == ["Really?!", "Yes.", "No?"]

    def test_delimiter_without_space_keeps_going(self):
        assert split_sentences("v1.2 shipped today.") == ["v1.2 shipped today."]

    def test_whitespace_only_dropped(self):
        assert split_sentences("  .  ") == ["."]
        assert split_sentences("   ") == []

    def test_custom_abbreviations(self):
        custom = frozenset({"approx"})
        assert split_sentences("It is approx. five.", custom) == ["It is approx. five."]


class TestSegmentSentences:
    def test_ids_and_provenance(self):
        records = segment_sentences(make_chunk("One works. Two works."))
        assert [r.sent_id for r in records] == ["d#0@0", "d#0@1"]
        assert all(r.chunk_id == "d#0" for r in records)

    def test_empty_chunk_impossible_but_whitespace(self):
        assert segment_sentences(make_chunk(" \n ")) == []


def records(n):
    return [SentenceRecord(f"c@{i}", f"s{i}.", "c") for i in range(n)]


class TestWindowBatches:
    def test_five_sentences(self):
        batches = window_batches(records(5), 3, 1)
        spans = [[s.sent_id for s in b.sentences] for b in batches]
        assert spans == [["c@0", "c@1", "c@2"], ["c@2", "c@3", "c@4"]]

    def test_single_sentence(self):
        batches = window_batches(records(1), 3, 1)
        assert len(batches) == 1
        assert len(batches[0].sentences) == 1

    def test_four_sentences_short_tail(self):
        batches = window_batches(records(4), 3, 1)
        spans = [[s.sent_id for s in b.sentences] for b in batches]
        assert spans == [["c@0", "c@1", "c@2"], ["c@2", "c@3"]]

    def test_empty(self):
        assert window_batches([], 3, 1) == []

    def test_invalid_overlap(self):
        with pytest.raises(ValueError):
            window_batches(records(3), 3, 3)

    @settings(max_examples=80, deadline=None)
    @given(
        n=st.integers(min_value=0, max_value=40),
        size=st.integers(min_value=1, max_value=8),
        overlap_frac=st.floats(min_value=0.0, max_value=0.99),
    )
    def test_coverage_and_overlap_properties(self, n, size, overlap_frac):
        overlap = min(int(size * overlap_frac), size - 1)
        batches = window_batches(records(n), size, overlap)
        seen = [s.sent_id for b in batches for s in b.sentences]
        assert set(seen) == {f"c@{i}" for i in range(n)}
        for a, b in zip(batches, batches[1:]):
            if len(b.sentences) == size:
                shared = set(s.sent_id for s in a.sentences) & set(
                    s.sent_id for s in b.sentences
                )
                assert len(shared) == overlap


class TestContainsVerb:
    def test_verb_sentence(self, showcase):
        assert contains_verb(showcase["launch"]) is True

    def test_noun_fragment(self, misc):
        assert contains_verb(misc["noverb"]) is False

    def test_aux_counts(self, misc):
        assert contains_verb(misc["aux_passive_flag"]) is True
