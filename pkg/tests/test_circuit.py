import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diagsynth.circuit import (
    Circuit, Gate, GateKind, NotDiagonalError, PhaseVector, cnot, depth, diag_phases,
    export_text, gate_counts, h, phase_response, rx, ry, rz, unitary_of, wrap, x,
)
from conftest import parse_qasm

CNOT01 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def rz_matrix(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def random_diagonal_circuit(r, n, gates):
    out = []
    for _ in range(gates):
        if n > 1 and r.uniform() < 0.5:
            c, t = r.choice(n, size=2, replace=False)
            out.append(cnot(int(c), int(t)))
        else:
            out.append(rz(r.uniform(-math.pi, math.pi), int(r.integers(n))))
    # undo the net CNOT permutation so the circuit is diagonal
    out += [g for g in reversed(out) if g.kind is GateKind.CNOT]
    return Circuit(n, tuple(out), r.uniform(-1, 1))


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate(GateKind.CNOT, 1)
    with pytest.raises(ValueError):
        cnot(1, 1)
    with pytest.raises(ValueError):
        Gate(GateKind.RZ, 0, control=1)
    with pytest.raises(ValueError):
        Gate(GateKind.X, 0, angle=0.3)
    with pytest.raises(ValueError):
        rz(float("nan"), 0)
    with pytest.raises(ValueError, match="outside"):
        Circuit(2, (cnot(0, 2),))


def test_empty_circuit_is_identity():
    assert np.array_equal(unitary_of(Circuit(1)), np.eye(2))


def test_qubit_zero_is_most_significant():
    u = unitary_of(Circuit(2, (x(0),)))
    assert u[2, 0] == 1 and u[0, 2] == 1


def test_cnot_matrix():
    assert np.allclose(unitary_of(Circuit(2, (cnot(0, 1),))), CNOT01)


def test_rz_convention():
    assert np.allclose(unitary_of(Circuit(1, (rz(0.7, 0),))), rz_matrix(0.7))


def test_global_phase_applied():
    u = unitary_of(Circuit(1, (), 0.4))
    assert np.allclose(u, np.exp(0.4j) * np.eye(2))


@pytest.mark.parametrize("theta", np.random.default_rng(5).uniform(-math.pi, math.pi, 20))
def test_xyx_sandwich_is_rz(theta):
    u = unitary_of(Circuit(1, (rx(-math.pi / 2, 0), ry(theta, 0), rx(math.pi / 2, 0))))
    assert np.max(np.abs(u - rz_matrix(theta))) < 1e-12


@pytest.mark.parametrize("theta", np.random.default_rng(6).uniform(-math.pi, math.pi, 20))
def test_rx_conjugated_cnot(theta):
    # RX on the target commutes with a CNOT: RX(-t) CNOT RX(t) = CNOT
    u = unitary_of(Circuit(2, (rx(theta, 1), cnot(0, 1), rx(-theta, 1))))
    assert np.max(np.abs(u - CNOT01)) < 1e-12


def test_x_conjugated_cnot():
    u = unitary_of(Circuit(2, (x(0), x(1), cnot(0, 1), x(0))))
    assert np.max(np.abs(u - CNOT01)) < 1e-12


def test_dense_simulator_capacity():
    with pytest.raises(MemoryError):
        unitary_of(Circuit(13))


def test_diag_phases_zero_angles():
    c = Circuit(3, (rz(0.0, 0), cnot(0, 2), rz(0.0, 2), cnot(0, 2)))
    assert np.array_equal(diag_phases(c).phases, np.zeros(8))


def test_two_qubit_scheme_matches_dense(rng):
    a, b, c = rng.uniform(-math.pi, math.pi, 3)
    circ = Circuit(2, (rz(a, 0), rz(b, 1), cnot(0, 1), rz(c, 1), cnot(0, 1)))
    u = unitary_of(circ)
    assert np.max(np.abs(u - np.diag(np.diag(u)))) < 1e-15
    assert np.max(np.abs(wrap(diag_phases(circ).phases - np.angle(np.diag(u))))) < 1e-12


@pytest.mark.parametrize("phi", [0.3, -1.1, math.pi])
def test_zz_tail_phases(phi):
    c = Circuit(2, (cnot(0, 1), rz(phi, 1), cnot(0, 1)))
    assert np.allclose(diag_phases(c).phases, [-phi / 2, phi / 2, phi / 2, -phi / 2], atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 40), st.integers(0, 2**32 - 1))
def test_simulators_agree(n, gates, seed):
    c = random_diagonal_circuit(np.random.default_rng(seed), n, gates)
    d = np.diag(unitary_of(c))
    assert np.max(np.abs(np.abs(d) - 1)) < 1e-12
    assert np.max(np.abs(wrap(diag_phases(c).phases - np.angle(d)))) < 1e-10


def test_diag_phases_rejects_rotations():
    with pytest.raises(NotDiagonalError):
        diag_phases(Circuit(1, (rx(0.1, 0),)))
    with pytest.raises(NotDiagonalError):
        diag_phases(Circuit(1, (h(0),)))


def test_diag_phases_rejects_residual_permutation():
    with pytest.raises(NotDiagonalError, match="not diagonal"):
        diag_phases(Circuit(2, (cnot(0, 1),)))


def test_x_pair_is_diagonal():
    c = Circuit(1, (x(0), rz(0.5, 0), x(0)))
    assert np.allclose(diag_phases(c).phases, [0.25, -0.25])
    assert np.allclose(np.angle(np.diag(unitary_of(c))), [0.25, -0.25])


def test_phase_response_is_linear_part(rng):
    c = random_diagonal_circuit(rng, 4, 30)
    angles = np.array([g.angle for g in c.gates if g.kind is GateKind.RZ])
    resp = phase_response(c)
    assert resp.shape == (16, angles.size)
    assert np.allclose(resp @ angles + c.global_phase, diag_phases(c).phases, atol=1e-12)


def test_phase_vector_validation():
    with pytest.raises(ValueError):
        PhaseVector(2, np.zeros(3))
    with pytest.raises(ValueError):
        PhaseVector(1, [0.0, np.inf])


def test_wrap_range():
    w = wrap(np.array([math.pi, -math.pi, 3 * math.pi, 0.5, -7.0]))
    assert np.all(w > -math.pi) and np.all(w <= math.pi)
    assert w[0] == pytest.approx(math.pi) and w[1] == pytest.approx(math.pi)
    assert w[3] == 0.5


def test_depth_and_counts():
    assert depth(Circuit(2)) == 0
    c = Circuit(2, (cnot(0, 1),))
    assert depth(c) == 1
    assert gate_counts(c) == {"CNOT": 1}
    c = Circuit(3, (rz(0.1, 0), rz(0.2, 1), rz(0.3, 2), rz(0.4, 0)))
    assert depth(c) == 2
    c = Circuit(3, (rz(0.1, 0), cnot(0, 1), rz(0.2, 2), cnot(1, 2)))
    assert depth(c) == 3


def test_depth_equals_max_wire_load_for_disjoint_gates():
    c = Circuit(3, (rz(0.1, 0), rz(0.2, 0), rz(0.3, 1), x(2), x(2), x(2)))
    per_wire = max(sum(q in g.wires for g in c.gates) for q in range(3))
    assert depth(c) == per_wire == 3


def test_export_lines():
    assert "rz(0.5) q[0];" in export_text(Circuit(1, (rz(0.5, 0),))).splitlines()
    text = export_text(Circuit(2, (cnot(0, 1), x(1))))
    assert text.startswith("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n")
    assert "qreg q[2];" in text
    assert "cx q[0],q[1];" in text and "x q[1];" in text


def test_export_round_trip(rng):
    gates = (rz(rng.normal(), 0), rx(1 / 3, 1), ry(-2.5e-17, 2), h(0), x(2), cnot(2, 0))
    c = Circuit(3, gates, global_phase=math.pi / 7)
    back = parse_qasm(export_text(c))
    assert back == c
