import numpy as np
import pytest
from hypothesis import strategies as st

from hsrm_id.network import SensorGraph, grid_graph


@st.composite
def connected_graphs(draw, min_n=2, max_n=8):
    """Random connected graph with random positive distances."""
    n = draw(st.integers(min_n, max_n))
    edges = {}
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges[(u, v)] = draw(st.floats(0.1, 10.0))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and draw(st.booleans()):
                edges[(i, j)] = draw(st.floats(0.1, 10.0))
    return SensorGraph(n, [(i, j, d) for (i, j), d in edges.items()])


@pytest.fixture
def grid5():
    return grid_graph(5, 5)


@pytest.fixture
def path3():
    return SensorGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])


def brute_force_global(tau, edges, contributions, q0):
    """Reference global update: explicit double loop, no shared helpers."""
    out = {}
    for e in edges:
        total = 0.0
        for path, quality in contributions:
            traversed = False
            for a, b in zip(path, path[1:]):
                if (min(a, b), max(a, b)) == e:
                    traversed = True
            if traversed:
                total += quality
        out[e] = q0 * q0 * tau[e] + (1 - q0) ** 2 * total
    return out


def rng_states(seed):
    return np.random.default_rng(seed)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record and print one PASS/FAIL line per acceptance criterion, then assert."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
