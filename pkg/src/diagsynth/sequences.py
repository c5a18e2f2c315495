"""CNOT control-label sequences for the tails of diagonal circuits.

Labels are 1-indexed: label ``k`` means control qubit ``k - 1`` with the
tail's target on the last qubit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache


class SequenceKind(str, Enum):
    BINARY_TREE = "binary_tree"
    STRANGE_FRACTAL = "strange_fractal"

    @classmethod
    def parse(cls, value: "SequenceKind | str") -> "SequenceKind":
        if isinstance(value, cls):
            return value
        aliases = {"tree": cls.BINARY_TREE, "fractal": cls.STRANGE_FRACTAL}
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class ControlSequence:
    labels: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))
        bad = [v for v in self.labels if not 1 <= v <= self.n - 1]
        if bad:
            raise ValueError(f"labels {bad} fall outside [1, {self.n - 1}] for n={self.n}")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __str__(self) -> str:
        return ",".join(map(str, self.labels))

    def controls(self) -> tuple[int, ...]:
        """Physical control qubits (0-indexed)."""
        return tuple(v - 1 for v in self.labels)


def concat(a: ControlSequence, b: ControlSequence) -> ControlSequence:
    return ControlSequence(a.labels + b.labels, max(a.n, b.n))


def shift(a: ControlSequence, m: int) -> ControlSequence:
    return ControlSequence(tuple(v + m for v in a.labels), a.n + m)


def reflect(a: ControlSequence, n: int) -> ControlSequence:
    """The sequence ``n - a``."""
    return ControlSequence(tuple(n - v for v in a.labels), n)


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"control sequences need n >= 2, got {n}")


@lru_cache(maxsize=None)
def strange_fractal_half(n: int) -> ControlSequence:
    """``a_n = a_{n-1} o (n - a_{n-1})`` with ``a_2 = {1}``."""
    _check_n(n)
    a = ControlSequence((1,), 2)
    for m in range(3, n + 1):
        a = concat(ControlSequence(a.labels, m), reflect(a, m))
    return a


@lru_cache(maxsize=None)
def binary_tree_full(n: int) -> ControlSequence:
    """``A_n = {1} o a_n`` with ``a_n = (a_{n-1} + 1) o {1} o (a_{n-1} + 1)``."""
    _check_n(n)
    aux: tuple[int, ...] = ()
    for _ in range(2, n + 1):
        up = tuple(v + 1 for v in aux)
        aux = up + (1,) + up
    return ControlSequence((1,) + aux, n)


def tail_sequence(n: int, kind: SequenceKind | str) -> ControlSequence:
    """Full control sequence of the level-``n`` tail (length ``2^(n-1)``)."""
    kind = SequenceKind.parse(kind)
    if kind is SequenceKind.BINARY_TREE:
        return binary_tree_full(n)
    half = strange_fractal_half(n)
    return concat(half, half)


def tail_lengths(n: int) -> tuple[int, int]:
    """(RZ count, CNOT count) of the level-``n`` tail."""
    _check_n(n)
    return 1 << (n - 1), 1 << (n - 1)


def gate_totals(n: int) -> tuple[int, int]:
    """(RZ count, CNOT count) summed over all levels of an n-qubit circuit."""
    if n < 1:
        raise ValueError("n must be positive")
    rz, cx = 1, 0
    for m in range(2, n + 1):
        t_rz, t_cx = tail_lengths(m)
        rz += t_rz
        cx += t_cx
    return rz, cx
