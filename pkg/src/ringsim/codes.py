"""Stabilizer code descriptors and exact encoded-state construction.

Two codes appear here: the five-qubit perfect code, whose generators are
cyclic shifts of ZXXZI and whose logical operators are the weight-five
transversal Paulis, and a distance-3 planar code on nine data qubits used
as a noiseless scheduling benchmark.
"""

from __future__ import annotations

import numpy as np

from . import pauli
from .statevec import StateVector

# Cyclic generators of the five-qubit code.  The first four are independent;
# the fifth is their product (with + sign) and is listed because the ring
# experiment measures all five each cycle.
FIVE_QUBIT_GENERATORS = ("ZXXZI", "IZXXZ", "ZIZXX", "XZIZX", "XXZIZ")

FIVE_QUBIT_LOGICALS = {"X": "XXXXX", "Y": "YYYYY", "Z": "ZZZZZ"}

# Cardinal-state labels in the order (prep gate, state name).
CARDINAL_STATES = ("0", "1", "+", "-", "i+", "i-")

SINGLE_QUBIT_CARDINAL = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
    "i+": np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0),
    "i-": np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2.0),
}

# Bloch vector of each cardinal state.
CARDINAL_BLOCH = {
    "0": (0.0, 0.0, 1.0),
    "1": (0.0, 0.0, -1.0),
    "+": (1.0, 0.0, 0.0),
    "-": (-1.0, 0.0, 0.0),
    "i+": (0.0, 1.0, 0.0),
    "i-": (0.0, -1.0, 0.0),
}


def syndrome_of_error(error: str) -> tuple[int, ...]:
    """Anticommutation pattern of a five-qubit Pauli with all five generators."""
    err = pauli.parse_label(error)
    return tuple(
        0 if pauli.commutes(err, pauli.parse_label(g)) else 1
        for g in FIVE_QUBIT_GENERATORS
    )


def project_onto_code(sv: StateVector, generators=FIVE_QUBIT_GENERATORS[:4]) -> StateVector:
    """Apply (I + g)/2 for each generator and renormalize.

    The seed must have non-zero overlap with the code space.
    """
    out = sv.copy()
    for g in generators:
        flipped = out.copy()
        flipped.apply_pauli(g)
        out.amps = 0.5 * (out.amps + flipped.amps)
    out.renormalize()
    return out


def exact_logical_init(state: str) -> StateVector:
    """Exact codeword of the five-qubit code for a cardinal label.

    Projects the five-fold product of the single-qubit cardinal state onto
    the code space.  The product state is an eigenstate of the matching
    transversal logical operator, and the projectors commute with it, so the
    result is the corresponding logical eigenstate.
    """
    if state not in CARDINAL_STATES:
        raise ValueError(f"unknown cardinal state {state!r}")
    one = SINGLE_QUBIT_CARDINAL[state]
    amps = one
    for _ in range(4):
        amps = np.kron(amps, one)
    return project_onto_code(StateVector(5, amps))


def exact_logical_encode(alpha: complex, beta: complex) -> StateVector:
    """alpha |0_L> + beta |1_L> with |1_L> = X_L |0_L>, built by projection."""
    amps = np.zeros(32, dtype=complex)
    amps[0] = alpha
    amps[31] = beta
    nrm = np.linalg.norm(amps)
    if nrm == 0:
        raise ValueError("alpha and beta cannot both vanish")
    amps /= nrm
    return project_onto_code(StateVector(5, amps))


def encoding_circuit(alpha: complex, beta: complex) -> StateVector:
    """Spread a single-qubit state across five qubits with four CNOTs.

    Produces alpha |00000> + beta |11111>, on which the transversal
    weight-five Paulis act exactly like the corresponding single-qubit
    operators on the input.  This is the error-free state-injection input
    used for arbitrary-state runs.
    """
    nrm = np.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    if nrm == 0:
        raise ValueError("alpha and beta cannot both vanish")
    sv = StateVector(5)
    sv.amps[0] = alpha / nrm
    sv.amps[16] = beta / nrm  # |10000>
    cnot = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    for target in range(1, 5):
        sv.apply_two(cnot, 0, target)
    return sv


def generator_expectations(sv: StateVector, generators=FIVE_QUBIT_GENERATORS) -> np.ndarray:
    return np.array([sv.expectation_pauli(g) for g in generators])


# ----------------------------------------------------------------------
# Distance-3 planar code on a 3x3 data grid (noiseless benchmark only)
# ----------------------------------------------------------------------

# Stabilizer of each ancilla a0..a7, as a Pauli label over data qubits d0..d8.
SURFACE17_STABILIZERS = (
    "IXXIIIIII",  # a0
    "ZIIZIIIII",  # a1
    "XXIXXIIII",  # a2
    "IZZIZZIII",  # a3
    "IIIZZIZZI",  # a4
    "IIIIXXIXX",  # a5
    "IIIIIZIIZ",  # a6
    "IIIIIIXXI",  # a7
)

SURFACE17_X_ANCILLAS = (0, 2, 5, 7)
SURFACE17_Z_ANCILLAS = (1, 3, 4, 6)

SURFACE17_LOGICALS = {"X": "XIIXIIXII", "Z": "ZZZIIIIII"}

# CZ interaction order: for each ancilla, the data qubit touched at each of
# the four interaction steps of its half-cycle (None = ancilla idles).
SURFACE17_CZ_STEPS = {
    0: (None, None, 1, 2),
    2: (0, 1, 3, 4),
    5: (4, 5, 7, 8),
    7: (6, 7, None, None),
    1: (None, 0, None, 3),
    3: (1, 2, 4, 5),
    4: (3, 4, 6, 7),
    6: (5, None, 8, None),
}


def surface17_logical_zero() -> StateVector:
    """Exact +1 eigenstate of all eight stabilizers and of Z_L."""
    sv = StateVector.computational([0] * 9)
    return project_onto_code(
        sv, [SURFACE17_STABILIZERS[a] for a in SURFACE17_X_ANCILLAS]
    )


def surface17_syndrome_of_error(error: str) -> tuple[int, ...]:
    err = pauli.parse_label(error)
    return tuple(
        0 if pauli.commutes(err, pauli.parse_label(s)) else 1
        for s in SURFACE17_STABILIZERS
    )
