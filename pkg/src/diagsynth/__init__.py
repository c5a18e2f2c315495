"""Synthesis of diagonal unitaries into RZ + CNOT circuits, plus the linear-model
pipeline that recovers the angle-to-phase map from data."""

from .circuit import Circuit, Gate, GateKind, PhaseVector, diag_phases, export_text, unitary_of
from .diagonal import (
    DiagonalUnitary,
    PhaseMap,
    RnMatrix,
    build_ansatz,
    build_phase_map,
    decompose,
    rn_matrix,
)
from .sequences import ControlSequence, SequenceKind

__version__ = "0.1.0"

__all__ = [
    "Circuit", "Gate", "GateKind", "PhaseVector", "diag_phases", "export_text", "unitary_of",
    "DiagonalUnitary", "PhaseMap", "RnMatrix", "build_ansatz", "build_phase_map", "decompose",
    "rn_matrix", "ControlSequence", "SequenceKind",
]
