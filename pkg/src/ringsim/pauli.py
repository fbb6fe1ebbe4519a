"""Pauli-string algebra and small dense oracles.

Pauli operators are labeled by integers 0..3 in the order I, X, Y, Z.
An n-qubit Pauli string is a tuple of such labels, qubit 0 first.  The
flat index of a string in a 4^n coefficient array is the base-4 number
with qubit 0 as the most significant digit, matching the C-order axes of
an array of shape (4,) * n.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

LABELS = "IXYZ"

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

SINGLE = (I2, X, Y, Z)

# Product table: P_a P_b = PHASE[a, b] * P_{PROD[a, b]}, phases in {1, i, -1, -i}
# stored as the exponent k of i^k.
PROD = np.zeros((4, 4), dtype=np.int64)
PHASE_EXP = np.zeros((4, 4), dtype=np.int64)
for _a in range(4):
    for _b in range(4):
        m = SINGLE[_a] @ SINGLE[_b]
        for _c in range(4):
            tr = np.trace(SINGLE[_c].conj().T @ m) / 2.0
            if abs(tr) > 0.5:
                PROD[_a, _b] = _c
                k = int(round(np.angle(tr) / (np.pi / 2))) % 4
                PHASE_EXP[_a, _b] = k
                break


def parse_label(label: str) -> tuple[int, ...]:
    """Convert a string like 'ZXXZI' to a tuple of integer labels."""
    try:
        return tuple(LABELS.index(ch) for ch in label.upper())
    except ValueError:
        raise ValueError(f"invalid Pauli label {label!r}") from None


def format_label(pauli: Sequence[int]) -> str:
    return "".join(LABELS[p] for p in pauli)


def string_index(pauli: Sequence[int]) -> int:
    """Flat index of a Pauli string in the 4^n coefficient array."""
    idx = 0
    for p in pauli:
        idx = (idx << 2) | int(p)
    return idx


def index_string(idx: int, n_qubits: int) -> tuple[int, ...]:
    out = []
    for q in range(n_qubits):
        out.append((idx >> (2 * (n_qubits - 1 - q))) & 3)
    return tuple(out)


def string_matrix(pauli: Sequence[int] | str) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a Pauli string (oracle use, small n)."""
    if isinstance(pauli, str):
        pauli = parse_label(pauli)
    m = np.array([[1.0 + 0j]])
    for p in pauli:
        m = np.kron(m, SINGLE[p])
    return m


def multiply(a: Sequence[int], b: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Product of two Pauli strings.

    Returns:
        (phase_exponent, product) where the product operator is
        i^phase_exponent times the returned string.
    """
    if len(a) != len(b):
        raise ValueError("Pauli strings must have equal length")
    k = 0
    prod = []
    for pa, pb in zip(a, b):
        k += PHASE_EXP[pa, pb]
        prod.append(int(PROD[pa, pb]))
    return k % 4, tuple(prod)


def commutes(a: Sequence[int] | str, b: Sequence[int] | str) -> bool:
    """Whether two Pauli strings commute (symplectic criterion)."""
    if isinstance(a, str):
        a = parse_label(a)
    if isinstance(b, str):
        b = parse_label(b)
    anti = 0
    for pa, pb in zip(a, b):
        if pa != 0 and pb != 0 and pa != pb:
            anti += 1
    return anti % 2 == 0


def weight(pauli: Sequence[int]) -> int:
    return sum(1 for p in pauli if p != 0)


def all_strings(n_qubits: int) -> Iterable[tuple[int, ...]]:
    """Iterate all 4^n Pauli strings in flat-index order."""
    for idx in range(4**n_qubits):
        yield index_string(idx, n_qubits)


def unitary_ptm(u: np.ndarray) -> np.ndarray:
    """Pauli transfer matrix of a unitary on 1 or 2 qubits.

    R[i, j] = Tr(P_i U P_j U^dag) / 2^n.  The result is real and, for a
    trace-preserving unitary, orthogonal with first row (1, 0, ..., 0).
    """
    dim = u.shape[0]
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError("unitary dimension must be a power of two")
    basis = [string_matrix(s) for s in all_strings(n)]
    udag = u.conj().T
    r = np.empty((4**n, 4**n), dtype=np.float64)
    for j, pj in enumerate(basis):
        m = u @ pj @ udag
        for i, pi in enumerate(basis):
            r[i, j] = np.real(np.trace(pi @ m)) / dim
    return r


def kraus_ptm(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Pauli transfer matrix of a channel given by Kraus operators."""
    dim = kraus[0].shape[0]
    n = int(round(np.log2(dim)))
    basis = [string_matrix(s) for s in all_strings(n)]
    r = np.empty((4**n, 4**n), dtype=np.float64)
    for j, pj in enumerate(basis):
        m = np.zeros((dim, dim), dtype=np.complex128)
        for k in kraus:
            m += k @ pj @ k.conj().T
        for i, pi in enumerate(basis):
            r[i, j] = np.real(np.trace(pi @ m)) / dim
    return r


def ptm_to_choi(r: np.ndarray) -> np.ndarray:
    """Choi matrix (unnormalized, trace 2^n) of a channel given as a PTM.

    Used to certify complete positivity of composed channels in tests.
    """
    dim2 = r.shape[0]
    n = int(round(np.log2(dim2) / 2))
    d = 2**n
    basis = [string_matrix(s) for s in all_strings(n)]
    choi = np.zeros((d * d, d * d), dtype=np.complex128)
    for j, pj in enumerate(basis):
        out = np.zeros((d, d), dtype=np.complex128)
        for i, pi in enumerate(basis):
            out += r[i, j] * pi
        choi += np.kron(pj.T, out)
    return choi / d
