from pathlib import Path

import pytest
from hypothesis import settings

from attitude_spectrum import corpus
from attitude_spectrum.pipeline import bundled

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

DATA = Path(bundled("stopwords_es.txt")).parent


@pytest.fixture(scope="session")
def stopwords():
    return corpus.load_stopwords(DATA / "stopwords_es.txt")


@pytest.fixture(scope="session")
def fixture_corpus_path():
    return DATA / "fixture_corpus.jsonl"


# (criterion number, title, passed, detail) rows filled by test_acceptance.py
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
