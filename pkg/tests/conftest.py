from __future__ import annotations

import pytest

from scenetext.fixtures import fixture_path, load_scene, reference_grammar
from scenetext.grammar import load_grammar

# small grammar covering the red-box example tree
BOX_GRAMMAR_TEXT = """\
indet/1
1\ta {1}

color/2
1\t{2} {1}

on-top-of/2
1\t{1} is on top of {2}
1\ton top of {2} is {1}
1\tthere is {1} on top of {2}
"""

BOX_ON_TABLE = "on-top-of(indet(color(box, red)), indet(table))"


@pytest.fixture(scope="session")
def box_grammar():
    return load_grammar(BOX_GRAMMAR_TEXT)


@pytest.fixture(scope="session")
def ref_grammar():
    return reference_grammar()


@pytest.fixture(scope="session")
def learned_grammar():
    return load_grammar(fixture_path("learned_grammar.txt").read_text("utf-8"))


@pytest.fixture(scope="session")
def kitchen():
    return load_scene("kitchen")


# (criterion number, passed, detail) appended by test_acceptance.py
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {detail}")
