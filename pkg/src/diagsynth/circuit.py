"""Gate-level circuit IR, a dense simulator, a diagonal-phase simulator and
an OpenQASM 2 exporter.

Conventions used throughout the package:

* qubit 0 is the most significant bit of a basis index (``q0 (x) q1 (x) ...``);
* ``RZ(t) = diag(exp(-i t/2), exp(+i t/2))``;
* gates are listed in time order, so the circuit unitary is
  ``G_last @ ... @ G_first`` times ``exp(i * global_phase)``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from enum import Enum

import numpy as np

MAX_DENSE_QUBITS = 12


class GateKind(str, Enum):
    RZ = "RZ"
    RX = "RX"
    RY = "RY"
    X = "X"
    H = "H"
    CNOT = "CNOT"


ROTATIONS = frozenset({GateKind.RZ, GateKind.RX, GateKind.RY})


class NotDiagonalError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubit: int
    control: int | None = None
    angle: float = 0.0

    def __post_init__(self):
        if not isinstance(self.kind, GateKind):
            object.__setattr__(self, "kind", GateKind(self.kind))
        if self.qubit < 0:
            raise ValueError("qubit index must be non-negative")
        if self.kind is GateKind.CNOT:
            if self.control is None:
                raise ValueError("CNOT needs a control qubit")
            if self.control == self.qubit:
                raise ValueError("CNOT control and target must differ")
            if self.control < 0:
                raise ValueError("qubit index must be non-negative")
        elif self.control is not None:
            raise ValueError(f"{self.kind.value} takes no control qubit")
        if self.kind not in ROTATIONS and self.angle != 0.0:
            raise ValueError(f"{self.kind.value} takes no angle")
        if not math.isfinite(self.angle):
            raise ValueError("gate angle must be finite")

    @property
    def wires(self) -> tuple[int, ...]:
        if self.control is None:
            return (self.qubit,)
        return (self.control, self.qubit)


def rz(angle: float, qubit: int) -> Gate:
    return Gate(GateKind.RZ, qubit, angle=float(angle))


def rx(angle: float, qubit: int) -> Gate:
    return Gate(GateKind.RX, qubit, angle=float(angle))


def ry(angle: float, qubit: int) -> Gate:
    return Gate(GateKind.RY, qubit, angle=float(angle))


def x(qubit: int) -> Gate:
    return Gate(GateKind.X, qubit)


def h(qubit: int) -> Gate:
    return Gate(GateKind.H, qubit)


@lru_cache(maxsize=4096)
def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, target, control=control)


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = ()
    global_phase: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if g.qubit >= self.n or (g.control is not None and g.control >= self.n):
                raise ValueError(f"gate {g} addresses a qubit outside 0..{self.n - 1}")
        if not math.isfinite(self.global_phase):
            raise ValueError("global phase must be finite")

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class PhaseVector:
    n: int
    phases: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.phases, dtype=np.float64).reshape(-1)
        if p.size != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} phases for n={self.n}, got {p.size}")
        if not np.all(np.isfinite(p)):
            raise ValueError("phases must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "phases", p)

    def wrapped(self) -> np.ndarray:
        return wrap(self.phases)


def wrap(phases) -> np.ndarray:
    """Map angles into (-pi, pi]."""
    p = np.asarray(phases, dtype=np.float64)
    w = np.mod(p + np.pi, 2.0 * np.pi) - np.pi
    return np.where(w <= -np.pi, w + 2.0 * np.pi, w)


def _matrix(g: Gate) -> np.ndarray:
    k = g.kind
    if k is GateKind.RZ:
        return np.diag([np.exp(-0.5j * g.angle), np.exp(0.5j * g.angle)])
    if k is GateKind.RX:
        c, s = math.cos(g.angle / 2), math.sin(g.angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if k is GateKind.RY:
        c, s = math.cos(g.angle / 2), math.sin(g.angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if k is GateKind.X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k is GateKind.H:
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    raise AssertionError(k)


def unitary_of(c: Circuit) -> np.ndarray:
    """Dense 2^n x 2^n unitary of ``c``."""
    if c.n > MAX_DENSE_QUBITS:
        raise MemoryError(f"dense simulation is capped at {MAX_DENSE_QUBITS} qubits, got {c.n}")
    dim = 1 << c.n
    # rows are the output index; reshape exposes one axis per qubit
    u = np.eye(dim, dtype=complex).reshape((2,) * c.n + (dim,))
    for g in c.gates:
        if g.kind is GateKind.CNOT:
            sel1 = [slice(None)] * c.n
            sel1[g.control] = 1
            sub = u[tuple(sel1)]
            t = g.qubit - (1 if g.qubit > g.control else 0)
            sub[...] = np.flip(sub, axis=t).copy()
        else:
            u = np.moveaxis(np.tensordot(_matrix(g), u, axes=([1], [g.qubit])), 0, g.qubit)
    return u.reshape(dim, dim) * np.exp(1j * c.global_phase)


def _sign_planes(n: int) -> np.ndarray:
    """``planes[q, x] = (-1)^(bit of qubit q in x)``."""
    idx = np.arange(1 << n)
    return np.stack([1.0 - 2.0 * ((idx >> (n - 1 - q)) & 1) for q in range(n)])


def _walk(c: Circuit, on_rz) -> None:
    # each basis state is tracked through the gates as a set of +-1 bit planes
    planes = _sign_planes(c.n)
    start = planes.copy()
    for g in c.gates:
        k = g.kind
        if k is GateKind.RZ:
            on_rz(g, planes[g.qubit])
        elif k is GateKind.CNOT:
            planes[g.qubit] *= planes[g.control]
        elif k is GateKind.X:
            planes[g.qubit] *= -1.0
        else:
            raise NotDiagonalError(f"{k.value} does not preserve the computational basis")
    if not np.array_equal(planes, start):
        raise NotDiagonalError("circuit is not diagonal")


def diag_phases(c: Circuit) -> PhaseVector:
    """Phases of a diagonal RZ/X/CNOT circuit in O(gates * 2^n).

    Follows each basis state through the circuit, accumulating the RZ phase
    picked up along the way. The result is not wrapped.
    """
    acc = np.zeros(1 << c.n)

    def add(g: Gate, sign: np.ndarray) -> None:
        np.subtract(acc, sign * (0.5 * g.angle), out=acc)

    _walk(c, add)
    return PhaseVector(c.n, acc + c.global_phase)


def phase_response(c: Circuit) -> np.ndarray:
    """Phase contributed per unit angle by every RZ gate, one column each.

    ``diag_phases`` of the same circuit equals ``phase_response(c) @ angles``
    plus the global phase, where ``angles`` are the RZ angles in gate order.
    """
    cols: list[np.ndarray] = []
    _walk(c, lambda g, sign: cols.append(-0.5 * sign))
    if not cols:
        return np.zeros((1 << c.n, 0))
    return np.stack(cols, axis=1)


def depth(c: Circuit) -> int:
    level = [0] * c.n
    for g in c.gates:
        d = max(level[w] for w in g.wires) + 1
        for w in g.wires:
            level[w] = d
    return max(level)


def gate_counts(c: Circuit) -> dict[str, int]:
    return dict(Counter(g.kind.value for g in c.gates))


_QASM_NAMES = {
    GateKind.RZ: "rz",
    GateKind.RX: "rx",
    GateKind.RY: "ry",
    GateKind.X: "x",
    GateKind.H: "h",
}


def format_angle(a: float) -> str:
    return format(float(a), ".17g")


def export_text(c: Circuit) -> str:
    """OpenQASM 2.0 text for ``c``; the global phase goes in a comment."""
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"// global_phase: {format_angle(c.global_phase)}",
        f"qreg q[{c.n}];",
    ]
    for g in c.gates:
        if g.kind is GateKind.CNOT:
            lines.append(f"cx q[{g.control}],q[{g.qubit}];")
        elif g.kind in ROTATIONS:
            lines.append(f"{_QASM_NAMES[g.kind]}({format_angle(g.angle)}) q[{g.qubit}];")
        else:
            lines.append(f"{_QASM_NAMES[g.kind]} q[{g.qubit}];")
    return "\n".join(lines) + "\n"
