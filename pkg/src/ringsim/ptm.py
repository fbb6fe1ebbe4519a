"""Density matrices as real Pauli-coefficient tensors.

A state on n qubits is stored as the 4^n real coefficients
c_P = Tr(P rho), rho = 2^-n sum_P c_P P, flattened in the index order of
:mod:`ringsim.pauli`.  Trace preservation is the statement c_I = 1, and
every coefficient of a physical state is bounded by 1 in magnitude.

This module is the plain reference engine: channels are applied as
Pauli transfer matrices one site or one pair at a time with no layout
tricks.  The production cycle executor in :mod:`ringsim.runner` is
cross-checked against it.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import pauli

# T4[p, r*2+c] = (P_p)[c, r]; contracting a per-qubit (row, col) pair axis
# of rho with T4 yields that qubit's Pauli-coefficient axis, since
# Tr(P rho) = sum_{rc} P[c, r] rho[r, c].
_T4 = np.zeros((4, 4), dtype=np.complex128)
for _p in range(4):
    for _i in range(2):
        for _j in range(2):
            _T4[_p, _j * 2 + _i] = pauli.SINGLE[_p][_i, _j]
_T4_INV = _T4.conj().T / 2.0


class PauliState:
    """Mutable Pauli-coefficient representation of an n-qubit state."""

    def __init__(self, n_qubits: int, coeffs: np.ndarray | None = None,
                 dtype=np.float64):
        self.n = int(n_qubits)
        if coeffs is None:
            coeffs = np.zeros(4**self.n, dtype=dtype)
            coeffs[0] = 1.0
        else:
            coeffs = np.asarray(coeffs, dtype=dtype).reshape(4**self.n)
        self.c = coeffs

    # -- constructors ---------------------------------------------------

    @classmethod
    def computational(cls, bits: Sequence[int], dtype=np.float64) -> "PauliState":
        """Product state |b_0 b_1 ... b_{n-1}>.

        Each qubit contributes (I + (-1)^b Z)/2, so the coefficient of a
        string is 0 unless the string is in {I, Z}^n, in which case it is
        the product of the per-qubit Z signs.
        """
        n = len(bits)
        state = cls(n, dtype=dtype)
        view = state.tensor()
        view[...] = 0.0
        one = np.array([1.0, 0.0, 0.0, 1.0], dtype=dtype)
        for q, b in enumerate(bits):
            vec = one.copy()
            if b:
                vec[3] = -1.0
            shape = [1] * n
            shape[q] = 4
            if q == 0:
                acc = vec.reshape(shape)
            else:
                acc = acc * vec.reshape(shape)
        view[...] = acc
        return state

    @classmethod
    def from_density_matrix(cls, rho: np.ndarray, dtype=np.float64) -> "PauliState":
        """Convert a 2^n x 2^n density matrix via per-qubit transforms."""
        dim = rho.shape[0]
        n = int(round(np.log2(dim)))
        if 2**n != dim or rho.shape != (dim, dim):
            raise ValueError("density matrix must be square with power-of-two size")
        # group row and column bits per qubit: rho[r..., c...] -> (r0,c0,r1,c1,...)
        work = rho.reshape((2,) * (2 * n))
        perm = []
        for q in range(n):
            perm.extend([q, n + q])
        work = np.transpose(work, perm).reshape((4,) * n)
        for axis in range(n):
            work = np.tensordot(_T4, work, axes=[[1], [axis]])
            work = np.moveaxis(work, 0, axis)
        coeffs = work.reshape(-1)
        if np.abs(coeffs.imag).max() > 1e-9:
            raise ValueError("density matrix is not Hermitian")
        return cls(n, coeffs.real.copy(), dtype=dtype)

    @classmethod
    def from_statevector(cls, psi: np.ndarray, dtype=np.float64) -> "PauliState":
        psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
        return cls.from_density_matrix(np.outer(psi, psi.conj()), dtype=dtype)

    # -- views and readout ----------------------------------------------

    def tensor(self) -> np.ndarray:
        return self.c.reshape((4,) * self.n)

    def copy(self) -> "PauliState":
        return PauliState(self.n, self.c.copy(), dtype=self.c.dtype)

    @property
    def trace_coeff(self) -> float:
        return float(self.c[0])

    def coeff(self, pauli_string: Sequence[int] | str) -> float:
        if isinstance(pauli_string, str):
            pauli_string = pauli.parse_label(pauli_string)
        return float(self.c[pauli.string_index(pauli_string)])

    def expectation(self, pauli_string: Sequence[int] | str) -> float:
        """<P> = Tr(P rho) / Tr(rho)."""
        return self.coeff(pauli_string) / self.trace_coeff

    def to_density_matrix(self) -> np.ndarray:
        work = self.tensor().astype(np.complex128)
        for axis in range(self.n):
            work = np.tensordot(_T4_INV, work, axes=[[1], [axis]])
            work = np.moveaxis(work, 0, axis)
        # undo the per-qubit (row, col) pair grouping: axes are (r0,c0,r1,c1,...)
        work = work.reshape((2,) * (2 * self.n))
        perm = [2 * q for q in range(self.n)] + [2 * q + 1 for q in range(self.n)]
        work = np.transpose(work, perm)
        return work.reshape(2**self.n, 2**self.n)

    # -- channel application --------------------------------------------

    def apply_one(self, r4: np.ndarray, site: int) -> None:
        """Apply a single-qubit PTM to one site."""
        view = self.tensor()
        out = np.tensordot(np.asarray(r4, dtype=self.c.dtype), view,
                           axes=[[1], [site]])
        self.c = np.ascontiguousarray(np.moveaxis(out, 0, site)).reshape(-1)

    def apply_two(self, r16: np.ndarray, site_a: int, site_b: int) -> None:
        """Apply a two-qubit PTM; r16 rows/cols are indexed (site_a, site_b)."""
        if site_a == site_b:
            raise ValueError("sites must differ")
        r = np.asarray(r16, dtype=self.c.dtype).reshape(4, 4, 4, 4)
        if site_a > site_b:
            r = r.transpose(1, 0, 3, 2)
            site_a, site_b = site_b, site_a
        view = self.tensor()
        out = np.tensordot(r, view, axes=[[2, 3], [site_a, site_b]])
        self.c = np.ascontiguousarray(
            np.moveaxis(out, [0, 1], [site_a, site_b])).reshape(-1)

    # -- site operations used by measurement and reset ------------------

    def site_z_expectation(self, site: int) -> float:
        s = [0] * self.n
        s[site] = 3
        return self.coeff(s) / self.trace_coeff

    def project_z(self, site: int, sign: int) -> float:
        """Project onto (I + sign*Z)/2 at a site and renormalize.

        Returns the pre-projection Born probability.  Raises if the
        probability is not positive (projection onto a zero branch).
        """
        if sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        view = self.tensor()
        idx = [slice(None)] * self.n
        sl = lambda p: tuple(idx[:site] + [p] + idx[site + 1:])
        ci = view[sl(0)]
        cz = view[sl(3)]
        new_i = 0.5 * (ci + sign * cz)
        view[sl(0)] = new_i
        view[sl(3)] = sign * new_i
        view[sl(1)] = 0.0
        view[sl(2)] = 0.0
        p = float(self.c[0])
        if p <= 0.0:
            raise ValueError(f"projection probability {p} is not positive")
        self.c *= 1.0 / p
        return p

    def reset(self, site: int) -> None:
        """Replace a site with |0>, discarding its correlations."""
        view = self.tensor()
        idx = [slice(None)] * self.n
        sl = lambda p: tuple(idx[:site] + [p] + idx[site + 1:])
        view[sl(3)] = view[sl(0)]
        view[sl(1)] = 0.0
        view[sl(2)] = 0.0

    def pauli_flip(self, site: int, which: int) -> None:
        """Conjugate by a single-qubit Pauli (1=X, 2=Y, 3=Z) at a site."""
        if which not in (1, 2, 3):
            raise ValueError("which must be 1, 2 or 3")
        view = self.tensor()
        idx = [slice(None)] * self.n
        for p in (1, 2, 3):
            if p != which:
                view[tuple(idx[:site] + [p] + idx[site + 1:])] *= -1.0

    def x_flip(self, site: int) -> None:
        self.pauli_flip(site, 1)

    # -- diagnostics ----------------------------------------------------

    def health(self) -> tuple[float, float]:
        """Return (|c_I - 1|, max |c_P| - 1) for drift monitoring."""
        trace_err = abs(float(self.c[0]) - 1.0)
        bound_err = float(np.abs(self.c).max()) - 1.0
        return trace_err, bound_err

    def check(self, tol: float | None = None) -> None:
        if tol is None:
            tol = 1e-12 if self.c.dtype == np.float64 else 1e-5
        trace_err, bound_err = self.health()
        if trace_err > tol:
            raise ValueError(f"trace coefficient drifted by {trace_err:.3e}")
        if bound_err > tol:
            raise ValueError(f"coefficient bound exceeded by {bound_err:.3e}")
