"""Synthesis of diagonal unitaries into RZ + CNOT circuits.

An n-qubit diagonal is built recursively: the (n-1)-qubit diagonal on the
leading qubits, then a tail on the last qubit that alternates RZ and CNOT
with controls taken from a control sequence. Every RZ in such a circuit
adds ``-(angle/2) * w(x)`` to the phase of basis state ``x``, where ``w`` is
a Walsh function fixed by the CNOTs applied before it. That makes the
angle-to-phase map a signed, column-permuted Walsh-Hadamard matrix, which
is what the fast solve exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import numkit
from .circuit import (
    Circuit,
    PhaseVector,
    cnot,
    diag_phases,
    phase_response,
    rz,
    unitary_of,
)
from .sequences import SequenceKind, gate_totals, tail_sequence
from .walsh import fwht

MAX_PHASE_MAP_QUBITS = 12
MAX_DECOMPOSE_QUBITS = 16


class UnreachablePhasesError(ArithmeticError):
    """Raised when a solve leaves a residual above tolerance."""


class ConjectureViolation(AssertionError):
    """r_n and the tensor power of r_2 did not match up to permutation."""


@dataclass(frozen=True)
class DiagonalUnitary:
    n: int
    phases: PhaseVector

    @classmethod
    def from_phases(cls, phases) -> "DiagonalUnitary":
        p = np.asarray(phases, dtype=np.float64).reshape(-1)
        n = p.size.bit_length() - 1
        if p.size < 2 or 1 << n != p.size:
            raise ValueError(f"phase count must be a power of two >= 2, got {p.size}")
        return cls(n, PhaseVector(n, p))

    @property
    def lam(self) -> np.ndarray:
        return self.phases.phases

    def is_special(self, tol: float = 1e-9) -> bool:
        s = float(np.sum(self.lam))
        return abs(math.remainder(s, 2 * math.pi)) < tol

    def matrix(self) -> np.ndarray:
        return np.diag(np.exp(1j * self.lam))


# ---------------------------------------------------------------- ansatz


def angle_count(n: int) -> int:
    return (1 << n) - 1


def build_ansatz(n: int, angles, kind: SequenceKind | str = SequenceKind.BINARY_TREE,
                 global_phase: float = 0.0) -> Circuit:
    """Recursive diagonal circuit with ``2^n - 1`` RZ and ``2^n - 2`` CNOT gates.

    Angles are consumed in recursion order: the sub-circuit's angles first,
    then the tail's, one per RZ.
    """
    if n < 1:
        raise ValueError("n must be positive")
    theta = np.asarray(angles, dtype=np.float64).reshape(-1)
    if theta.size != angle_count(n):
        raise ValueError(f"n={n} needs {angle_count(n)} angles, got {theta.size}")
    kind = SequenceKind.parse(kind)
    gates = [rz(theta[0], 0)]
    idx = 1
    for m in range(2, n + 1):
        target = m - 1
        for control in tail_sequence(m, kind).controls():
            gates.append(rz(theta[idx], target))
            gates.append(cnot(control, target))
            idx += 1
    return Circuit(n, tuple(gates), global_phase)


@lru_cache(maxsize=None)
def column_masks(n: int, kind: SequenceKind | str = SequenceKind.BINARY_TREE) -> tuple[int, ...]:
    """Walsh index of every ansatz angle, in angle order.

    Angle ``j`` contributes ``-(theta_j / 2) * (-1)^popcount(x & mask_j)`` to
    the phase of basis state ``x``. Derived symbolically from the control
    sequences, independently of any simulation.
    """
    kind = SequenceKind.parse(kind)
    bit = lambda q: 1 << (n - 1 - q)  # noqa: E731
    masks = [bit(0)]
    for m in range(2, n + 1):
        parity = 0
        for control in tail_sequence(m, kind).controls():
            masks.append(bit(m - 1) | parity)
            parity ^= bit(control)
        if parity:
            raise AssertionError(f"level {m} tail does not restore the basis")
    return tuple(masks)


def _masks_array(n: int, kind) -> np.ndarray:
    return np.asarray(column_masks(n, SequenceKind.parse(kind)), dtype=np.int64)


def structured_orthogonal(n: int, kind: SequenceKind | str = SequenceKind.BINARY_TREE) -> bool:
    """True when the masks are distinct and non-zero, i.e. M^T M = (2^n/4) I."""
    m = column_masks(n, SequenceKind.parse(kind))
    return len(set(m)) == len(m) and 0 not in m


def compose_phases(n: int, angles, kind: SequenceKind | str = SequenceKind.BINARY_TREE) -> np.ndarray:
    """``M @ angles`` via one inverse Walsh transform (batched on leading axes)."""
    theta = np.asarray(angles, dtype=np.float64)
    spectrum = np.zeros(theta.shape[:-1] + (1 << n,))
    np.add.at(spectrum, (..., _masks_array(n, kind)), -0.5 * theta)
    return fwht(spectrum)


def solve_angles(n: int, centered, kind: SequenceKind | str = SequenceKind.BINARY_TREE) -> np.ndarray:
    """Angles reproducing zero-mean phases, ``(4 / 2^n) M^T v`` by a Walsh transform."""
    v = np.asarray(centered, dtype=np.float64)
    spectrum = fwht(v)
    return spectrum[..., _masks_array(n, kind)] * (-2.0 / (1 << n))


# ---------------------------------------------------------------- phase map


@dataclass(frozen=True)
class PhaseMap:
    n: int
    kind: SequenceKind
    matrix: np.ndarray = field(repr=False)
    masks: tuple[int, ...] = field(repr=False)

    @property
    def tail(self) -> np.ndarray:
        """Columns belonging to the last qubit's tail."""
        return self.matrix[:, -(1 << (self.n - 1)):] if self.n > 1 else self.matrix

    def apply(self, angles) -> np.ndarray:
        return np.asarray(angles, dtype=np.float64) @ self.matrix.T


@lru_cache(maxsize=16)
def build_phase_map(n: int, kind: SequenceKind | str = SequenceKind.BINARY_TREE) -> PhaseMap:
    """Extract the exact angle-to-phase matrix of the ansatz by simulation.

    Columns are the impulse responses of the diagonal-phase simulator,
    snapped to +-1/2, then cross-checked for linearity and against the
    symbolic Walsh masks.
    """
    if not 1 <= n <= MAX_PHASE_MAP_QUBITS:
        raise ValueError(f"phase maps are built for 1 <= n <= {MAX_PHASE_MAP_QUBITS}, got {n}")
    kind = SequenceKind.parse(kind)
    k = angle_count(n)
    circ = build_ansatz(n, np.zeros(k), kind)
    raw = phase_response(circ)
    snapped = np.round(raw * 2.0) / 2.0
    dev = float(np.max(np.abs(raw - snapped)))
    if dev > numkit.TOL.snap or not np.all(np.abs(snapped) == 0.5):
        raise ArithmeticError(f"phase map entries are not +-1/2 (deviation {dev:.3e})")

    rng = np.random.default_rng(0x5EED)
    ta, tb = rng.uniform(-1.0, 1.0, size=(2, k))
    pa = diag_phases(build_ansatz(n, ta, kind)).phases
    pb = diag_phases(build_ansatz(n, tb, kind)).phases
    pab = diag_phases(build_ansatz(n, ta + tb, kind)).phases
    scale = max(1.0, float(np.max(np.abs(pab))))
    if (np.max(np.abs(pa + pb - pab)) > numkit.TOL.snap * scale
            or np.max(np.abs(snapped @ (ta + tb) - pab)) > numkit.TOL.snap * scale):
        raise ArithmeticError("ansatz phase response failed the superposition check")

    masks = column_masks(n, kind)
    idx = np.arange(1 << n)
    parity = (np.bitwise_count(idx[:, None] & np.asarray(masks)[None, :]) & 1).astype(np.float64)
    expected = -0.5 * (1.0 - 2.0 * parity)
    if not np.array_equal(snapped, expected):
        raise ArithmeticError("extracted phase map disagrees with the symbolic Walsh masks")
    snapped.setflags(write=False)
    return PhaseMap(n, kind, snapped, masks)


# ---------------------------------------------------------------- decomposition


def decompose_angles(phases, kind: SequenceKind | str = SequenceKind.BINARY_TREE,
                     tol: float = numkit.TOL.residual):
    """Solve for ansatz angles. Accepts a single phase vector or a batch.

    Returns ``(angles, global_phase, residual)``; residual is the max-norm
    mismatch ``|M angles - centered|``.
    """
    lam = np.asarray(phases, dtype=np.float64)
    size = lam.shape[-1]
    n = size.bit_length() - 1
    if size < 2 or 1 << n != size:
        raise ValueError(f"phase count must be a power of two >= 2, got {size}")
    if n > MAX_DECOMPOSE_QUBITS:
        raise ValueError(f"decompose supports n <= {MAX_DECOMPOSE_QUBITS}, got {n}")
    if not np.all(np.isfinite(lam)):
        raise ValueError("phases must be finite")
    kind = SequenceKind.parse(kind)
    gphase = lam.mean(axis=-1)
    centered = lam - gphase[..., None]
    if structured_orthogonal(n, kind):
        angles = solve_angles(n, centered, kind)
        recon = compose_phases(n, angles, kind)
    else:
        pm = build_phase_map(n, kind)
        angles = numkit.lstsq(pm.matrix, np.moveaxis(centered, -1, 0))
        angles = np.moveaxis(angles, 0, -1)
        recon = pm.apply(angles)
    residual = np.max(np.abs(recon - centered), axis=-1)
    if np.any(residual > tol):
        raise UnreachablePhasesError(
            f"phases outside reachable set: residual {float(np.max(residual)):.3e} > {tol:.1e}")
    return angles, gphase, residual


def decompose(d: DiagonalUnitary, kind: SequenceKind | str = SequenceKind.BINARY_TREE,
              tol: float = numkit.TOL.residual) -> tuple[Circuit, float]:
    """Circuit for ``d`` plus the solve residual."""
    angles, gphase, residual = decompose_angles(d.lam, kind, tol)
    return build_ansatz(d.n, angles, kind, float(gphase)), float(residual)


def decompose_dense(d: DiagonalUnitary, kind: SequenceKind | str = SequenceKind.BINARY_TREE) -> np.ndarray:
    """Reference route: ``(4/2^n) M^T centered`` with the extracted dense map."""
    pm = build_phase_map(d.n, kind)
    centered = d.lam - d.lam.mean()
    return (4.0 / (1 << d.n)) * (pm.matrix.T @ centered)


def recompose(c: Circuit) -> np.ndarray:
    return diag_phases(c).phases


def total_gates(n: int) -> int:
    r, c = gate_totals(n)
    return r + c


# ---------------------------------------------------------------- r_n algebra

_R_LITERAL = {
    2: [[1, 1],
        [1, -1]],
    3: [[1, 1, 1, 1],
        [1, -1, -1, 1],
        [1, 1, -1, -1],
        [1, -1, 1, -1]],
    4: [[1, 1, 1, 1, 1, 1, 1, 1],
        [1, -1, -1, 1, 1, -1, -1, 1],
        [1, 1, -1, -1, -1, -1, 1, 1],
        [1, -1, 1, -1, -1, 1, -1, 1],
        [1, 1, 1, 1, -1, -1, -1, -1],
        [1, -1, -1, 1, -1, 1, 1, -1],
        [1, 1, -1, -1, 1, 1, -1, -1],
        [1, -1, 1, -1, 1, -1, 1, -1]],
}


@dataclass(frozen=True)
class RnMatrix:
    n: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.int64)
        size = 1 << (self.n - 1)
        if e.shape != (size, size):
            raise ValueError(f"r_{self.n} must be {size}x{size}, got {e.shape}")
        if not np.all(np.abs(e) == 1):
            raise ValueError("r_n entries must be +-1")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)


def tensor_power_r2(k: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.int64)
    r2 = np.array(_R_LITERAL[2], dtype=np.int64)
    for _ in range(k):
        out = np.kron(out, r2)
    return out


def extracted_rn(n: int, kind: SequenceKind | str = SequenceKind.BINARY_TREE) -> np.ndarray:
    """Last-qubit tail block of the phase map, rows with the target bit set, times 2."""
    if n < 2:
        raise ValueError("r_n needs n >= 2")
    tail = build_phase_map(n, kind).tail
    return np.rint(2.0 * tail[1::2]).astype(np.int64)


def _walsh_coordinates(e: np.ndarray):
    """Write a 0/1 matrix as ``e[r, c] = <phi(r), psi(c)> mod 2`` if possible.

    Returns integer codes ``(phi, psi)`` or None when ``e`` is not the
    character table of an elementary abelian 2-group.
    """
    rows, cols = e.shape
    k = rows.bit_length() - 1
    if rows != cols or 1 << k != rows:
        return None
    # greedy F2 basis of the row space
    basis_rows: list[int] = []
    reduced: list[tuple[int, int]] = []  # (pivot bit, vector)
    for r in range(rows):
        v = int("".join(map(str, e[r][::-1])), 2) if cols else 0
        for piv, b in reduced:
            if v >> piv & 1:
                v ^= b
        if v:
            piv = v.bit_length() - 1
            reduced.append((piv, v))
            basis_rows.append(r)
    if len(basis_rows) != k:
        return None
    weights = 1 << np.arange(k, dtype=np.int64)
    psi = (e[basis_rows].T.astype(np.int64) * weights).sum(axis=1)
    if len(set(psi.tolist())) != cols:
        return None
    unit_cols = [int(np.flatnonzero(psi == (1 << i))[0]) for i in range(k)]
    phi = (e[:, unit_cols].astype(np.int64) * weights).sum(axis=1)
    model = np.bitwise_count(phi[:, None] & psi[None, :]) & 1
    if not np.array_equal(model, e):
        return None
    return phi, psi


def find_permutation(a, b):
    """Row and column permutations with ``a[rows][:, cols] == b``, or None.

    Columns are aligned through their Walsh coordinates; rows are then
    matched by sorting their sign patterns.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        return None
    ca = _walsh_coordinates((a < 0).astype(np.uint8))
    cb = _walsh_coordinates((b < 0).astype(np.uint8))
    if ca is None or cb is None:
        return None
    _, psi_a = ca
    _, psi_b = cb
    where_a = np.empty_like(psi_a)
    where_a[psi_a] = np.arange(psi_a.size)
    cols = where_a[psi_b]
    aligned = a[:, cols]
    order_a = np.lexsort(aligned.T[::-1])
    order_b = np.lexsort(b.T[::-1])
    rows = np.empty_like(order_a)
    rows[order_b] = order_a
    if not np.array_equal(aligned[rows], b):
        return None
    return rows, cols


def rn_matrix(n: int) -> RnMatrix:
    """Canonical r_n: stored literals for n <= 4, the extracted tail block beyond.

    Either way the result must be permutation-equivalent to r_2^(n-1);
    a mismatch raises ConjectureViolation.
    """
    if not 2 <= n <= MAX_PHASE_MAP_QUBITS:
        raise ValueError(f"r_n is available for 2 <= n <= {MAX_PHASE_MAP_QUBITS}, got {n}")
    if n in _R_LITERAL:
        entries = np.array(_R_LITERAL[n], dtype=np.int64)
    else:
        entries = extracted_rn(n)
    if find_permutation(entries, tensor_power_r2(n - 1)) is None:
        raise ConjectureViolation(f"r_{n} is not a row/column permutation of r_2^(x){n - 1}")
    return RnMatrix(n, entries)


def rn_inverse(r: RnMatrix) -> np.ndarray:
    """``r^T / 2^(n-1)`` after an exact integer orthogonality check."""
    e = r.entries
    scale = 1 << (r.n - 1)
    if not np.array_equal(e @ e.T, scale * np.eye(e.shape[0], dtype=np.int64)):
        raise ArithmeticError(f"r_{r.n} r_{r.n}^T != {scale} I")
    return e.T / scale


@dataclass(frozen=True)
class DetRow:
    n: int
    logabsdet: float
    expected: float
    tensor_logabsdet: float
    tensor_expected: float

    @property
    def rel_error(self) -> float:
        return abs(self.logabsdet - self.expected) / abs(self.expected)

    @property
    def tensor_rel_error(self) -> float:
        return abs(self.tensor_logabsdet - self.tensor_expected) / abs(self.tensor_expected)

    def passed(self, rtol: float = 1e-9) -> bool:
        return self.rel_error <= rtol and self.tensor_rel_error <= rtol


def det_relation_check(n_max: int) -> list[DetRow]:
    """Compare ln|det r_n| with (n-1) 2^(n-2) ln 2 for n = 2..n_max."""
    if not 2 <= n_max <= 10:
        raise ValueError("n_max must lie in 2..10")
    rows = []
    for n in range(2, n_max + 1):
        k = n - 1
        expected = k * 2 ** (n - 2) * math.log(2)
        rows.append(DetRow(
            n=n,
            logabsdet=numkit.logabsdet(rn_matrix(n).entries),
            expected=expected,
            tensor_logabsdet=numkit.logabsdet(tensor_power_r2(k)),
            tensor_expected=k * 2 ** (k - 1) * numkit.logabsdet(np.array(_R_LITERAL[2], dtype=float)),
        ))
    return rows


# ---------------------------------------------------------------- special operators


def tbar_squared_phases(N: int, phi: float) -> np.ndarray:
    """``lambda_m = (m + N - 1) * 2m * phi`` for m = 1..N."""
    if N < 1:
        raise ValueError("N must be positive")
    m = np.arange(1, N + 1, dtype=np.float64)
    return (m + N - 1) * 2 * m * phi


def tbar_squared(N: int, phi: float) -> DiagonalUnitary:
    """The same phases as a synthesizable diagonal; ``N`` must be a power of two."""
    return DiagonalUnitary.from_phases(tbar_squared_phases(N, phi))


@dataclass(frozen=True)
class WeylReport:
    phi: float
    max_deviation: float
    g_z: float
    xx: float
    yy: float
    zz: float

    @property
    def coordinates(self) -> tuple[float, float, float]:
        """Interaction coefficients sorted by magnitude, largest first."""
        return tuple(sorted((self.xx, self.yy, self.zz), key=lambda v: -abs(v)))

    def passed(self, tol: float = numkit.TOL.unitarity) -> bool:
        return (self.max_deviation < tol and abs(self.xx) < tol and abs(self.yy) < tol
                and abs(self.g_z + self.phi / 2) < tol)


_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]])
_PAULI_Z = np.diag([1.0 + 0j, -1.0])


def zz_tail(phi: float) -> Circuit:
    """``CNOT (I x RZ(phi)) CNOT``, the two-qubit tail with a single angle."""
    return Circuit(2, (cnot(0, 1), rz(phi, 1), cnot(0, 1)))


def weyl_tail_check(phi: float) -> WeylReport:
    """Compare the two-qubit tail with exp(-(i/2) phi Z(x)Z) and read off its
    interaction coefficients in ``U = exp(i (xx XX + yy YY + zz ZZ) + local)``."""
    c = zz_tail(phi)
    u = unitary_of(c)
    zz_diag = np.array([1.0, -1.0, -1.0, 1.0])
    ref = np.diag(np.exp(-0.5j * phi * zz_diag))
    dev = float(np.max(np.abs(u - ref)))
    # generator L with U = exp(i L); the phase walk gives it without branch cuts
    gen = np.diag(diag_phases(c).phases).astype(complex)
    coeff = lambda p: float(np.real(np.trace(np.kron(p, p) @ gen)) / 4)  # noqa: E731
    zz = coeff(_PAULI_Z)
    return WeylReport(phi=float(phi), max_deviation=dev, g_z=zz,
                      xx=coeff(_PAULI_X), yy=coeff(_PAULI_Y), zz=zz)
