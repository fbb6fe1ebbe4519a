"""Pauli-transfer-matrix simulation of small stabilizer codes on a qubit ring."""

__version__ = "0.1.0"

from . import noise, pauli, ptm, statevec
from .noise import MeasurementErrorTable, NoiseParams
from .ptm import PauliState
from .statevec import StateVector

__all__ = [
    "MeasurementErrorTable",
    "NoiseParams",
    "PauliState",
    "StateVector",
    "noise",
    "pauli",
    "ptm",
    "statevec",
]
