import math

import numpy as np
import pytest

from qwqram import kernels
from qwqram.state import NodeIndex, SparseState, TreeShape

INV_SQRT3 = 1 / math.sqrt(3)

# demo scenario: n = 3, addresses 001, 011, 110
DEMO_SHAPE = TreeShape(3, 2)
DEMO_ADDRESSES = [0b001, 0b011, 0b110]
DEMO_MEMORY = {0b001: 0b10, 0b011: 0b01, 0b110: 0b11}


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    with kernels.use_backend(request.param):
        yield request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def entries_state(shape, triples, amp=1.0):
    """State from ``((w, l), c, a, d)`` tuples sharing one amplitude."""
    return SparseState.from_entries(
        shape, [((NodeIndex(l, w), c, a, d), amp) for (w, l), c, a, d in triples]
    )


def random_state(shape, rng, size=None):
    """Random normalised state with distinct labels anywhere in the tree."""
    size = size or int(rng.integers(1, 12))
    entries = {}
    while len(entries) < size:
        l = int(rng.integers(0, shape.n + 1))
        key = (
            NodeIndex(l, int(rng.integers(0, 1 << l))),
            int(rng.integers(0, 2)),
            int(rng.integers(0, 1 << shape.n)),
            int(rng.integers(0, 1 << shape.m)),
        )
        entries[key] = complex(rng.normal(), rng.normal())
    norm = math.sqrt(sum(abs(v) ** 2 for v in entries.values()))
    return SparseState.from_entries(shape, {k: v / norm for k, v in entries.items()})


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record ``(criterion, passed, detail)``; printed in the terminal summary."""

    def report(criterion, passed, detail):
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
