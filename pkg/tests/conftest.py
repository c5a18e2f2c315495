import re

import numpy as np
import pytest

from diagsynth.circuit import Circuit, Gate, GateKind

_QASM_LINE = re.compile(r"^(rz|rx|ry|x|h|cx)(?:\(([^)]*)\))?\s+q\[(\d+)\](?:,q\[(\d+)\])?;$")
_KINDS = {"rz": GateKind.RZ, "rx": GateKind.RX, "ry": GateKind.RY, "x": GateKind.X, "h": GateKind.H}


def parse_qasm(text: str) -> Circuit:
    """Minimal reader for the exporter's own dialect, used as a round-trip oracle."""
    n = None
    phase = 0.0
    gates = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(("OPENQASM", "include")):
            continue
        if line.startswith("// global_phase:"):
            phase = float(line.split(":", 1)[1])
            continue
        if line.startswith("//"):
            continue
        m = re.match(r"^qreg q\[(\d+)\];$", line)
        if m:
            n = int(m.group(1))
            continue
        m = _QASM_LINE.match(line)
        assert m, f"unparsed line {line!r}"
        name, angle, a, b = m.groups()
        if name == "cx":
            gates.append(Gate(GateKind.CNOT, int(b), control=int(a)))
        else:
            gates.append(Gate(_KINDS[name], int(a), angle=float(angle) if angle else 0.0))
    return Circuit(n, tuple(gates), phase)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
