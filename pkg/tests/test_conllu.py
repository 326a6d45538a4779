import pytest

from deprag.conllu import (
    InvalidTree,
    MalformedLine,
    IndexOutOfRange,
    noun_chunks,
    parse_conllu,
    subtree_span,
    to_conllu,
    write_conllu,
)

LAUNCH = """# sent_id = s1
1\tSAP\tSAP\tPROPN\t_\t_\t2\tnsubj\t_\t_
2\tlaunched\tlaunch\tVERB\t_\t_\t0\troot\t_\t_
3\tJoule\tJoule\tPROPN\t_\t_\t2\tobj\t_\t_
4\tfor\tfor\tADP\t_\t_\t5\tcase\t_\t_
5\tConsultants\tConsultants\tPROPN\t_\t_\t3\tnmod\t_\t_
"""


class TestParseConllu:
    def test_basic_block(self):
        sents = parse_conllu(LAUNCH)
        assert len(sents) == 1
        sent = sents[0]
        assert sent.sent_id == "s1"
        assert sent.root_index == 2
        assert [t.head for t in sent.tokens] == [2, 0, 2, 5, 3]

    def test_positional_sent_id(self):
        text = "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
        assert parse_conllu(text)[0].sent_id == "1"

    def test_lemma_defaults_to_form(self):
        text = "1\tRunning\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
        assert parse_conllu(text)[0].tokens[0].lemma == "Running"

    def test_multiword_range_skipped(self):
        text = (
            "1\tdel\tdel\tADP\t_\t_\t2\tcase\t_\t_\n"
            "2-3\tdella\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "2\tcasa\tcasa\tNOUN\t_\t_\t0\troot\t_\t_\n"
        )
        sent = parse_conllu(text)[0]
        assert [t.form for t in sent.tokens] == ["del", "casa"]

    def test_empty_node_skipped(self):
        text = (
            "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
            "1.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n"
        )
        assert len(parse_conllu(text)[0].tokens) == 1

    def test_wrong_column_count(self):
        with pytest.raises(MalformedLine, match="10 tab-separated"):
            parse_conllu("1\ta\ta\tNOUN\t_\t_\t0\troot\n")

    def test_non_integer_head(self):
        with pytest.raises(MalformedLine, match="non-integer head"):
            parse_conllu("1\ta\ta\tNOUN\t_\t_\tx\troot\t_\t_\n")

    def test_cycle_detected(self):
        text = (
            "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tNOUN\t_\t_\t3\tdep\t_\t_\n"
            "3\tc\tc\tNOUN\t_\t_\t2\tdep\t_\t_\n"
        )
        with pytest.raises(InvalidTree, match="cycle"):
            parse_conllu(text)

    def test_self_head_rejected(self):
        text = "1\ta\ta\tNOUN\t_\t_\t1\tdep\t_\t_\n"
        with pytest.raises(InvalidTree, match="own head"):
            parse_conllu(text)

    def test_zero_roots(self):
        text = (
            "1\ta\ta\tNOUN\t_\t_\t2\tdep\t_\t_\n"
            "2\tb\tb\tNOUN\t_\t_\t1\tdep\t_\t_\n"
        )
        with pytest.raises(InvalidTree):
            parse_conllu(text)

    def test_multiple_roots(self):
        text = (
            "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tNOUN\t_\t_\t0\troot\t_\t_\n"
        )
        with pytest.raises(InvalidTree, match="exactly one root"):
            parse_conllu(text)

    def test_dangling_head(self):
        text = "1\ta\ta\tNOUN\t_\t_\t9\tdep\t_\t_\n"
        with pytest.raises(InvalidTree, match="outside"):
            parse_conllu(text)

    def test_legacy_labels_canonicalized(self):
        text = (
            "1\tcode\tcode\tNOUN\t_\t_\t2\tnsubjpass\t_\t_\n"
            "2\tmoved\tmove\tVERB\t_\t_\t0\troot\t_\t_\n"
            "3\tit\tit\tPRON\t_\t_\t2\tdobj\t_\t_\n"
        )
        sent = parse_conllu(text)[0]
        assert sent.tokens[0].deprel == "nsubj:pass"
        assert sent.tokens[2].deprel == "obj"

    def test_comment_only_block_skipped(self):
        text = "# sent_id = broken\n# parse failed\n\n" + LAUNCH
        sents = parse_conllu(text)
        assert [s.sent_id for s in sents] == ["s1"]

    def test_multiple_blocks(self):
        two = LAUNCH + "\n" + LAUNCH.replace("s1", "s2")
        assert [s.sent_id for s in parse_conllu(two)] == ["s1", "s2"]


class TestRoundTrip:
    def test_round_trip_equality(self, showcase, misc):
        for sent in list(showcase.values()) + list(misc.values()):
            again = parse_conllu(to_conllu(sent))
            assert len(again) == 1
            assert again[0] == sent

    def test_write_many(self, showcase):
        text = write_conllu(showcase.values())
        assert len(parse_conllu(text)) == len(showcase)


class TestSubtreeSpan:
    def test_root_spans_everything(self, showcase):
        sent = showcase["launch"]
        assert [t.form for t in subtree_span(sent, sent.root_index)] == [
            "SAP",
            "launched",
            "Joule",
            "for",
            "Consultants",
        ]

    def test_leaf_is_itself(self, showcase):
        sent = showcase["launch"]
        assert [t.form for t in subtree_span(sent, 1)] == ["SAP"]

    def test_nested_span(self, showcase):
        sent = showcase["refactor"]
        assert [t.form for t in subtree_span(sent, 5)] == ["the", "Z-report"]

    def test_out_of_range(self, showcase):
        with pytest.raises(IndexOutOfRange):
            subtree_span(showcase["launch"], 6)

    def test_spans_disjoint_or_nested(self, showcase, misc):
        for sent in list(showcase.values()) + list(misc.values()):
            spans = [
                {t.index for t in subtree_span(sent, i)}
                for i in range(1, len(sent.tokens) + 1)
            ]
            for a in spans:
                for b in spans:
                    assert a <= b or b <= a or not (a & b)


class TestNounChunks:
    def test_launch_chunks(self, showcase):
        chunks = noun_chunks(showcase["launch"])
        assert [[t.form for t in span] for _, span in chunks] == [
            ["SAP"],
            ["Joule"],
            ["Consultants"],
        ]

    def test_developer_chunks(self, showcase):
        chunks = noun_chunks(showcase["refactor"])
        forms = [[t.form for t in span] for _, span in chunks]
        assert ["The", "developer"] in forms
        assert ["the", "Z-report"] in forms

    def test_compound_absorbed(self, showcase):
        chunks = noun_chunks(showcase["flagged"])
        forms = [[t.form for t in span] for _, span in chunks]
        # "function" is absorbed into the "module" chunk, not its own head.
        assert forms == [["The", "custom", "function", "module"]]

    def test_no_nominals(self):
        text = (
            "1\trun\trun\tVERB\t_\t_\t0\troot\t_\t_\n"
            "2\tfast\tfast\tADV\t_\t_\t1\tadvmod\t_\t_\n"
        )
        assert noun_chunks(parse_conllu(text)[0]) == []

    def test_chunks_disjoint_and_sorted(self, showcase, misc):
        for sent in list(showcase.values()) + list(misc.values()):
            chunks = noun_chunks(sent)
            covered: set[int] = set()
            last_start = 0
            for _, span in chunks:
                indices = {t.index for t in span}
                assert not (indices & covered)
                covered |= indices
                assert span[0].index >= last_start
                last_start = span[0].index
