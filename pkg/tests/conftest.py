import os

import pytest

from deprag.conllu import ParsedSentence, parse_conllu

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, outcome in _acceptance_results:
            terminalreporter.write_line(f"{outcome.upper():6s} {name}")


def load_fixture_sentences(name: str) -> dict[str, ParsedSentence]:
    with open(os.path.join(FIXTURES, name), encoding="utf-8") as fh:
        return {s.sent_id: s for s in parse_conllu(fh.read())}


@pytest.fixture(scope="session")
def showcase():
    """The three worked construction examples, keyed by sent_id."""
    return load_fixture_sentences("showcase_sentences.conllu")


@pytest.fixture(scope="session")
def misc():
    return load_fixture_sentences("misc_sentences.conllu")
