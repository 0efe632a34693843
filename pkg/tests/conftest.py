import numpy as np
import pytest

from tokq.instances import WeightedGraph, generate_base_instance

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.diag([1.0, -1.0]).astype(complex)
PAULIS = {"I": I2, "X": PX, "Y": PY, "Z": PZ}


def kron_op(n, ops):
    """Dense operator for {qubit: 'X'|'Y'|'Z'}; qubit 0 is the least significant bit."""
    m = np.array([[1.0 + 0j]])
    for q in reversed(range(n)):
        m = np.kron(m, PAULIS[ops.get(q, "I")])
    return m


def dense_hamiltonian(n, terms):
    """terms: iterable of (coefficient, {qubit: pauli})."""
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for c, ops in terms:
        h += c * kron_op(n, ops)
    return h


def edge_scan_cut(graph, bits):
    total = 0.0
    for u, v, w in graph.edges:
        if bits[u] != bits[v]:
            total += w
    return total


@pytest.fixture
def triangle():
    return WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))


@pytest.fixture
def k2():
    return WeightedGraph(2, ((0, 1, 1.0),))


@pytest.fixture
def g10():
    return generate_base_instance(10, 0.5, 1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
