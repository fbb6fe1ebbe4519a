"""Cache-friendly cycle engine for the ring experiment.

The generic executor in :mod:`ringsim.runner` applies one operation at a
time; this engine exploits the structure of the cycle instead:

* The ten qubits are grouped into five adjacent pairs and the state is a
  flat coefficient vector.  ``matmul(R, m.reshape(-1, d).T)`` applies a
  pair (or single-site) transfer matrix to the trailing axis group and
  rotates it to the front, so five sweeps transform every group and
  restore the order.  The alternating series pairings are handled by
  rolling the qubit grouping one site and back, a single transpose-copy.
* Consecutive operations that share a grouping are fused into one
  matrix: the opening Hadamard layer, series 1, and the following layer
  collapse into a single 16 x 16 block, and likewise for series 3 and 4.
* Between the reset that ends one cycle and the entangling block that
  opens the next, every ancilla is exactly |0>, so the inter-cycle state
  is the 4^5 data marginal.  The partial trace is the ancilla-identity
  slab of the coefficient tensor, which the reset does not touch, so
  extracting the marginal and re-tensoring |0> at the next expansion IS
  the reset.  During measurement, only the {I, Z} ancilla sectors can
  influence later outcomes or the marginal, so the projection skips the
  X/Y slabs and the usual renormalization; probabilities are taken as
  ratios against the running trace coefficient.

The engine draws the same random variates in the same order as the
generic executor, so both declare the same measurement record, and the
per-cycle logical Bloch vectors agree to float accumulation error.
"""

from __future__ import annotations

import numpy as np

from . import circuits, codes, noise, runner
from .ptm import PauliState

# |0> ancilla factor in Pauli coefficients: c_I = 1, c_Z = +1
_ANC_ZERO = np.array([1.0, 0.0, 0.0, 1.0])


def _roll_left(c: np.ndarray) -> np.ndarray:
    """Move the leading qubit axis to the back: order (0..9) -> (1..9, 0)."""
    return np.ascontiguousarray(c.reshape(4, -1).T).reshape(-1)


def _roll_right(c: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_roll_left`."""
    return np.ascontiguousarray(c.reshape(-1, 4).T).reshape(-1)


def _sweep(c: np.ndarray, r: np.ndarray, groups: int = 5) -> np.ndarray:
    """Apply a transfer matrix to every axis group of the state.

    ``r`` may be rectangular: a 16 x 4 matrix consumes a single-site
    axis and emits a pair axis, which is how the data marginal is
    re-tensored with fresh ancillas while the opening block runs.
    """
    in_dim = r.shape[1]
    m = c
    for _ in range(groups):
        m = np.matmul(r, m.reshape(-1, in_dim).T)
    return m.reshape(-1)


class FastRingEngine:
    """Precomputed fused blocks for one noise configuration."""

    def __init__(self, params: noise.NoiseParams | None = None,
                 table: noise.MeasurementErrorTable | None = None,
                 dtype=np.float64):
        self.params = noise.NoiseParams() if params is None else params
        self.table = noise.MeasurementErrorTable() if table is None else table
        self.dtype = dtype
        p = self.params

        idle20 = noise.idle_ptm(p.tau1, p)
        h = noise.hadamard_ptm(p)
        sdg = noise.rotation_ptm("z", -np.pi / 2.0)
        # noisy exchange gate followed by its virtual corrections
        series = np.kron(sdg, sdg) @ noise.two_qubit_ptm("iswap", p)
        # a layer is always idle on the even slot, Hadamard on the odd
        layer = np.kron(idle20, h)

        def cast(a):
            return np.asarray(a, dtype=dtype)

        # opening block: ancilla Hadamards, series 1, data Hadamards,
        # entered through the |0>-ancilla embedding of the data marginal
        b1 = layer @ series @ layer
        self._open = cast(b1 @ np.kron(np.eye(4), _ANC_ZERO.reshape(4, 1)))
        self._series = cast(series)                      # series 2, rolled frame
        self._mid = cast(layer @ series)                 # series 3 + data Hadamards
        self._close = cast(np.kron(h, idle20) @ series)  # series 4 + ancilla Hadamards
        self._idle_meas = cast(noise.idle_ptm(p.t_m, p))
        self._prep = {
            label: cast(noise.prep_gate_ptm(label, p))
            for label in noise.PREP_LABELS
        }
        self._basis = {
            label: cast(noise.basis_gate_ptm(label, p))
            for label in noise.PREP_LABELS
        }

    # -- state preparation ----------------------------------------------

    def initial_marginal(self, state) -> np.ndarray:
        """Data-register Pauli coefficients in site order 0,2,4,6,8."""
        if isinstance(state, str) and state.endswith("_L"):
            sv = codes.exact_logical_init(state[:-2])
            marg = PauliState.from_statevector(sv.amps, dtype=self.dtype).c
        elif isinstance(state, str):
            marg = PauliState.computational([0] * 5, dtype=self.dtype).c
            marg = _sweep(marg, self._prep[circuits._PREP_FOR_STATE[state]])
        else:
            alpha, beta = state
            sv = codes.encoding_circuit(alpha, beta)
            marg = PauliState.from_statevector(sv.amps, dtype=self.dtype).c
        return np.ascontiguousarray(marg)

    # -- measurement ----------------------------------------------------

    def _measure_ancillas(self, c: np.ndarray, rng, bits_out: list) -> None:
        """Project the five ancillas in site order 1,3,5,7,9.

        Runs in the rolled frame, where the ancillas are frame axes
        0,2,4,6,8.  Projections update only the {I, Z} slabs and leave
        the state unnormalized; outcome probabilities are ratios, and
        the post-measurement flip for a misassigned outcome is skipped
        because the reset discards the ancilla state either way.
        """
        view = c.reshape((4,) * 10)
        for s in (0, 2, 4, 6, 8):
            z = float(c[3 * 4 ** (9 - s)]) / float(c[0])
            p0 = min(max(0.5 * (1.0 + z), 0.0), 1.0)
            i = 0 if rng.random() < p0 else 1
            sign = 1.0 if i == 0 else -1.0
            sl = [slice(None)] * 10
            sl[s] = 0
            ci = view[tuple(sl)]
            sl[s] = 3
            cz = view[tuple(sl)]
            new_i = 0.5 * (ci + sign * cz)
            view[tuple(sl)] = sign * new_i
            sl[s] = 0
            view[tuple(sl)] = new_i
            m, _ = self.table.sample(i, rng.random())
            bits_out.append(m)

    def _extract_marginal(self, c: np.ndarray) -> np.ndarray:
        """Partial trace over the measured ancillas, back in site order."""
        view = c.reshape((4,) * 10)
        # rolled frame order is sites (1,2,...,9,0); ancilla axes are
        # 0,2,4,6,8 and the remaining data axes read (2,4,6,8,0)
        marg = view[0, :, 0, :, 0, :, 0, :, 0, :]
        marg = np.moveaxis(marg, 4, 0)
        marg = np.ascontiguousarray(marg).reshape(-1)
        if not np.isfinite(marg[0]) or marg[0] <= 0.0:
            raise runner.NumericalHealthError(
                f"trace coefficient degenerated to {marg[0]!r}")
        marg /= marg[0]
        return marg

    # -- main loop ------------------------------------------------------

    def run(self, state, n_cycles: int, rng, *, seed: int = 0, index: int = 0,
            health_tol: float | None = None) -> runner.Trajectory:
        """Same contract as the generic ring driver, cycle-structured."""
        cardinal = isinstance(state, str) and not state.endswith("_L")
        if isinstance(state, str):
            label = state
        else:
            alpha, beta = state
            label = f"enc({alpha:.6g},{beta:.6g})"
        marg = self.initial_marginal(state)

        anc_bits: list[int] = []
        bloch = np.zeros((n_cycles, 3))
        for cycle in range(n_cycles):
            c = _sweep(marg, self._open)
            c = _roll_left(c)
            c = _sweep(c, self._series)
            c = _roll_right(c)
            c = _sweep(c, self._mid)
            c = _roll_left(c)
            c = _sweep(c, self._close)
            self._measure_ancillas(c, rng, anc_bits)
            marg = self._extract_marginal(c)
            # the data idle through the measurement and reset windows,
            # applied twice to match the generic schedule op for op
            marg = _sweep(marg, self._idle_meas)
            marg = _sweep(marg, self._idle_meas)
            self._snapshot(marg, bloch[cycle], health_tol)

        basis_label = circuits._PREP_FOR_STATE[state] if cardinal else "I"
        marg = _sweep(marg, self._basis[basis_label])
        facade = PauliState(5, marg, dtype=self.dtype)
        final_bits: list[int] = []
        for s in range(5):
            z = facade.site_z_expectation(s)
            p0 = min(max(0.5 * (1.0 + z), 0.0), 1.0)
            i = 0 if rng.random() < p0 else 1
            facade.project_z(s, +1 if i == 0 else -1)
            m, o = self.table.sample(i, rng.random())
            if o != i:
                facade.x_flip(s)
            final_bits.append(m)

        return runner.Trajectory(
            label, n_cycles,
            np.array(anc_bits, dtype=np.uint8).reshape(n_cycles, 5),
            np.array(final_bits, dtype=np.uint8),
            bloch, seed, index)

    def _snapshot(self, marg: np.ndarray, out: np.ndarray, health_tol) -> None:
        for j in range(3):
            out[j] = float(marg[341 * (j + 1)])
        if health_tol is None:
            health_tol = 1e-9 if self.dtype == np.float64 else 1e-3
        bound = float(np.abs(marg).max()) - 1.0
        if not np.isfinite(bound) or bound > health_tol:
            raise runner.NumericalHealthError(
                f"marginal coefficient bound exceeded by {bound:.3e} "
                f"(tol {health_tol:.1e})")
