"""Plain statevector backend.

Used three ways: as the noiseless oracle for circuit semantics (cycle
validation, syndrome tables), as the only tractable representation of
the 17-qubit planar code, and as the Monte Carlo wavefunction engine
behind the fast dataset sampler.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import pauli


class StateVector:
    def __init__(self, n_qubits: int, amps: np.ndarray | None = None):
        self.n = int(n_qubits)
        if amps is None:
            amps = np.zeros(2**self.n, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.asarray(amps, dtype=np.complex128).reshape(2**self.n)
        self.amps = amps

    @classmethod
    def computational(cls, bits: Sequence[int]) -> "StateVector":
        sv = cls(len(bits))
        idx = 0
        for b in bits:
            idx = (idx << 1) | int(b)
        sv.amps[0] = 0.0
        sv.amps[idx] = 1.0
        return sv

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n)

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def renormalize(self) -> float:
        nrm = self.norm()
        if nrm <= 0.0:
            raise ValueError("cannot renormalize a zero state")
        self.amps *= 1.0 / nrm
        return nrm

    def apply_one(self, u2: np.ndarray, site: int) -> None:
        view = self.tensor()
        out = np.tensordot(np.asarray(u2, dtype=np.complex128), view,
                           axes=[[1], [site]])
        self.amps = np.ascontiguousarray(np.moveaxis(out, 0, site)).reshape(-1)

    def apply_two(self, u4: np.ndarray, site_a: int, site_b: int) -> None:
        u = np.asarray(u4, dtype=np.complex128).reshape(2, 2, 2, 2)
        if site_a > site_b:
            u = u.transpose(1, 0, 3, 2)
            site_a, site_b = site_b, site_a
        view = self.tensor()
        out = np.tensordot(u, view, axes=[[2, 3], [site_a, site_b]])
        self.amps = np.ascontiguousarray(
            np.moveaxis(out, [0, 1], [site_a, site_b])).reshape(-1)

    def apply_pauli(self, pauli_string: Sequence[int] | str) -> None:
        if isinstance(pauli_string, str):
            pauli_string = pauli.parse_label(pauli_string)
        for site, p in enumerate(pauli_string):
            if p:
                self.apply_one(pauli.SINGLE[p], site)

    def prob_zero(self, site: int) -> float:
        """Born probability of outcome 0 for a Z measurement at a site."""
        view = self.tensor()
        sl = [slice(None)] * self.n
        sl[site] = 0
        branch = view[tuple(sl)]
        return float(np.sum(np.abs(branch) ** 2))

    def project_z(self, site: int, outcome: int) -> float:
        """Collapse a site to a Z outcome (0 or 1); returns the probability."""
        p0 = self.prob_zero(site)
        p = p0 if outcome == 0 else 1.0 - p0
        if p <= 0.0:
            raise ValueError("projection onto a zero-probability branch")
        view = self.tensor()
        sl = [slice(None)] * self.n
        sl[site] = 1 - outcome
        view[tuple(sl)] = 0.0
        self.amps *= 1.0 / np.sqrt(p)
        return p

    def measure_z(self, site: int, rng: np.random.Generator) -> int:
        """Ideal projective Z measurement: one uniform draw, then collapse."""
        p0 = self.prob_zero(site)
        outcome = 0 if rng.random() < p0 else 1
        self.project_z(site, outcome)
        return outcome

    def set_to_zero(self, site: int, current: int) -> None:
        """Reset a site known to be in the computational state `current`."""
        if current:
            self.apply_one(pauli.X, site)

    def expectation_pauli(self, pauli_string: Sequence[int] | str) -> float:
        other = self.copy()
        other.apply_pauli(pauli_string)
        return float(np.vdot(self.amps, other.amps).real)

    def fidelity_with(self, other: "StateVector") -> float:
        return float(np.abs(np.vdot(self.amps, other.amps)) ** 2)
