from __future__ import annotations

import contextlib
import io
import random

import pytest
from hypothesis import settings, strategies as st

from mahn.cli import main
from mahn.lang import parse_process
from mahn.model import Process
from mahn.randgen import random_constraint, random_process

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

P1_TEXT = """\
process P1 {
  states: q0, q1, q2;
  init: q0;
  alphabet: a;
  rules:
    q0 --!!a--> q1;
    q0 --??a--> q2;
}
"""


@pytest.fixture
def p1() -> Process:
    return parse_process(P1_TEXT)


@pytest.fixture
def p1_file(tmp_path):
    path = tmp_path / "p1.mahn"
    path.write_text(P1_TEXT)
    return path


def processes(max_states: int = 5, max_rules: int = 10):
    return st.randoms(use_true_random=False).map(
        lambda rng: random_process(rng, max_states=max_states, max_rules=max_rules)
    )


def process_and_constraint(max_states: int = 5, absent: bool = True):
    def build(rng: random.Random):
        p = random_process(rng, max_states=max_states)
        return p, random_constraint(rng, p, absent=absent)

    return st.randoms(use_true_random=False).map(build)


def run_cli(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = main([str(a) for a in argv])
        except SystemExit as exc:
            code = exc.code
    return code, out.getvalue(), err.getvalue()


# one line per acceptance criterion, printed at the end of every run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
