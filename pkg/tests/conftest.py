import io

import numpy as np
import pytest

from gtnet import graph as gr

_VERDICTS = pytest.StashKey[list]()


def graph_from_text(text: str) -> gr.Graph:
    return gr.load_edge_list(io.StringIO(text))


@pytest.fixture
def p3():
    return graph_from_text("0 1\n1 2\n")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def verdict(request):
    """Record one acceptance line; repeated in the terminal summary."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
