"""Schedule execution and trajectory ensembles for the ring experiment.

The generic executor walks a :class:`ringsim.circuits.Schedule` moment by
moment against either backend: the Pauli-coefficient density matrix with
the full noise model, or the plain statevector with ideal gates, which
pins down circuit semantics in oracle tests.

Measurement is a two-draw protocol.  One uniform draw picks the projection
branch from the Born rule, a second picks the (declared, post-readout)
pair from the conditional readout table, and the qubit is flipped in place
when the post-readout state disagrees with the projection.

Randomness is reproducible by construction: every trajectory owns a
``SeedSequence(entropy=seed, spawn_key=(domain, index))`` stream, so an
ensemble gives byte-identical results no matter how it is chunked over
workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import circuits, codes, noise
from .ptm import PauliState
from .statevec import StateVector


class NumericalHealthError(RuntimeError):
    """Raised when the simulated state drifts outside physical bounds."""


# ----------------------------------------------------------------------
# Ideal unitaries for the statevector backend
# ----------------------------------------------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_S = np.diag([1.0, 1.0j])
_Z = np.diag([1.0, -1.0])
_SDG = _S.conj().T

_PREP_U = {
    "I": np.eye(2, dtype=complex),
    "X": _X,
    "H": _H,
    "ZH": _Z @ _H,
    "SH": _S @ _H,
    "ZSH": _Z @ _S @ _H,
}

_ISWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex
)
_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def _ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def trajectory_rng(seed: int, domain: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(domain, index))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class MeasurementEvent:
    time: float
    site: int
    projected: int
    declared: int
    post: int


class Executor:
    """Interpret a schedule against one backend, one trajectory at a time."""

    def __init__(self, n_qubits: int, backend: str = "dm",
                 params: noise.NoiseParams | None = None,
                 table: noise.MeasurementErrorTable | None = None,
                 dtype=np.float64):
        if backend not in ("dm", "sv"):
            raise ValueError("backend must be 'dm' or 'sv'")
        self.n = int(n_qubits)
        self.backend = backend
        self.params = noise.NoiseParams() if params is None else params
        self.table = noise.MeasurementErrorTable() if table is None else table
        self.dtype = dtype
        self._cache: dict = {}

    def fresh_state(self):
        bits = [0] * self.n
        if self.backend == "dm":
            return PauliState.computational(bits, dtype=self.dtype)
        return StateVector.computational(bits)

    # -- gate lookup ----------------------------------------------------

    def _ptm(self, key, build):
        r = self._cache.get(key)
        if r is None:
            r = self._cache[key] = build()
        return r

    def _dm_gate(self, op: circuits.Op) -> np.ndarray | None:
        p = self.params
        name = op.name
        if name == "idle":
            return self._ptm(("idle", op.duration),
                             lambda: noise.idle_ptm(op.duration, p))
        if name == "h":
            return self._ptm(("h",), lambda: noise.hadamard_ptm(p))
        if name == "prep_gate":
            return self._ptm(("prep", op.label),
                             lambda: noise.prep_gate_ptm(op.label, p))
        if name == "basis_gate":
            return self._ptm(("basis", op.label),
                             lambda: noise.basis_gate_ptm(op.label, p))
        if name == "ry":
            return self._ptm(("ry", op.angle),
                             lambda: noise.ry_gate_ptm(op.angle, p))
        if name == "sdg_sdg":
            return self._ptm(("sdg",),
                             lambda: noise.rotation_ptm("z", -math.pi / 2.0))
        if name == "iswap":
            return self._ptm(("iswap",), lambda: noise.two_qubit_ptm("iswap", p))
        if name == "cz":
            return self._ptm(("cz",), lambda: noise.two_qubit_ptm("cz", p))
        raise ValueError(f"unhandled op {name!r}")

    def _sv_gate(self, op: circuits.Op) -> np.ndarray:
        name = op.name
        if name == "h":
            return _H
        if name == "prep_gate":
            return _PREP_U[op.label]
        if name == "basis_gate":
            return _PREP_U[op.label].conj().T
        if name == "ry":
            return _ry(op.angle)
        if name == "sdg_sdg":
            return _SDG
        if name == "iswap":
            return _ISWAP
        if name == "cz":
            return _CZ
        raise ValueError(f"unhandled op {name!r}")

    # -- measurement and reset ------------------------------------------

    def _measure(self, state, site: int, rng, t: float) -> MeasurementEvent:
        if self.backend == "dm":
            z = state.site_z_expectation(site)
            p0 = min(max(0.5 * (1.0 + z), 0.0), 1.0)
        else:
            p0 = state.prob_zero(site)
        i = 0 if rng.random() < p0 else 1
        if self.backend == "dm":
            state.project_z(site, +1 if i == 0 else -1)
        else:
            state.project_z(site, i)
        m, o = self.table.sample(i, rng.random())
        if o != i:
            if self.backend == "dm":
                state.x_flip(site)
            else:
                flip = [0] * self.n
                flip[site] = 1
                state.apply_pauli(flip)
        return MeasurementEvent(t, site, i, m, o)

    # -- main loop ------------------------------------------------------

    def run(self, schedule: circuits.Schedule, state, rng,
            snapshot_times=(), snapshot_fn=None):
        """Execute every moment in order; returns (events, snapshots).

        ``snapshot_fn(state)`` is called once per requested time, just
        before the first moment at or after it (remaining snapshots are
        flushed at the end of the schedule).
        """
        events: list[MeasurementEvent] = []
        snaps: list = []
        times = sorted(snapshot_times)
        ti = 0
        post_bits = {}
        for moment in schedule.moments:
            while ti < len(times) and times[ti] <= moment.start + 1e-9:
                snaps.append(snapshot_fn(state))
                ti += 1
            for op in moment.ops:
                if op.name == "measure":
                    for s in op.sites:
                        ev = self._measure(state, s, rng, moment.start)
                        post_bits[s] = ev.post
                        events.append(ev)
                elif op.name == "reset":
                    for s in op.sites:
                        if self.backend == "dm":
                            state.reset(s)
                        else:
                            state.set_to_zero(s, post_bits.get(s, 0))
                elif op.name == "idle":
                    if self.backend == "dm":
                        r = self._dm_gate(op)
                        for s in op.sites:
                            state.apply_one(r, s)
                else:
                    g = self._dm_gate(op) if self.backend == "dm" else self._sv_gate(op)
                    if op.name in ("iswap", "cz"):
                        state.apply_two(g, op.sites[0], op.sites[1])
                    else:
                        # sdg_sdg and the single-site gates apply per site
                        for s in op.sites:
                            state.apply_one(g, s)
        while ti < len(times):
            snaps.append(snapshot_fn(state))
            ti += 1
        return events, snaps


# ----------------------------------------------------------------------
# Ring trajectories
# ----------------------------------------------------------------------

_LOGICAL_STRINGS = {}
for _w, _name in ((1, "X"), (2, "Y"), (3, "Z")):
    _s = [0] * 10
    for _q in circuits.DATA_SITES:
        _s[_q] = _w
    _LOGICAL_STRINGS[_name] = tuple(_s)


def logical_bloch(state) -> np.ndarray:
    """(<X_L>, <Y_L>, <Z_L>) on the data qubits, ancillas traced out."""
    if isinstance(state, PauliState):
        return np.array([state.expectation(_LOGICAL_STRINGS[p]) for p in "XYZ"])
    return np.array([state.expectation_pauli(_LOGICAL_STRINGS[p]) for p in "XYZ"])


def upper_bound_fidelity(bloch: np.ndarray) -> np.ndarray:
    """Best achievable recovery fidelity, (1 + |r|) / 2 along the last axis."""
    r = np.linalg.norm(np.asarray(bloch), axis=-1)
    return 0.5 * (1.0 + r)


def to_generator_frame(ancilla_bits: np.ndarray) -> np.ndarray:
    """Reorder (..., k, 5) position-ordered syndrome bits to generator order.

    Column j of the result is the outcome of generator j in every cycle,
    undoing the cycle-dependent rotation of the measurement positions.
    """
    bits = np.asarray(ancilla_bits)
    out = np.zeros_like(bits)
    n_cycles = bits.shape[-2]
    for c in range(n_cycles):
        for col, q in enumerate(circuits.ANCILLA_SITES):
            out[..., c, circuits.generator_at(q, c + 1)] = bits[..., c, col]
    return out


@dataclass
class Trajectory:
    state: str
    n_cycles: int
    ancilla_bits: np.ndarray   # (k, 5) declared bits, position order 1,3,5,7,9
    final_bits: np.ndarray     # (5,) declared bits, position order 0,2,4,6,8
    bloch: np.ndarray          # (k, 3) logical Bloch vector after each cycle
    seed: int = 0
    index: int = 0

    @property
    def ub_fidelity(self) -> np.ndarray:
        return upper_bound_fidelity(self.bloch)


def embed_data_state(sv5: StateVector) -> StateVector:
    """Lift a five-qubit data state onto the data sites of the ring register."""
    amps = np.zeros(2**10, dtype=complex)
    flat = sv5.amps.reshape(-1)
    for i5 in np.nonzero(flat)[0]:
        i10 = 0
        for j, site in enumerate(circuits.DATA_SITES):
            i10 |= ((int(i5) >> (4 - j)) & 1) << (9 - site)
        amps[i10] = flat[i5]
    return StateVector(10, amps)


def embed_surface17(sv9: StateVector) -> StateVector:
    """Lift a nine-qubit data state onto sites 0..8 of the planar register."""
    amps = np.zeros(2**17, dtype=complex)
    flat = sv9.amps.reshape(-1)
    for i9 in np.nonzero(flat)[0]:
        amps[int(i9) << 8] = flat[i9]
    return StateVector(17, amps)


def _health_check(state, tol: float | None):
    if isinstance(state, PauliState):
        if tol is None:
            tol = 1e-9 if state.c.dtype == np.float64 else 1e-3
        trace_err, bound_err = state.health()
        if trace_err > tol or bound_err > tol:
            raise NumericalHealthError(
                f"state drifted: trace error {trace_err:.3e}, "
                f"bound excess {bound_err:.3e} (tol {tol:.1e})")
    else:
        n = state.norm()
        if abs(n - 1.0) > (tol if tol is not None else 1e-9):
            raise NumericalHealthError(f"statevector norm drifted to {n}")


def run_trajectory(state, n_cycles: int, *, params=None, table=None,
                   seed: int = 0, index: int = 0, domain: int = 0,
                   backend: str = "dm", dtype=np.float64, engine: str = "generic",
                   schedule: circuits.Schedule | None = None,
                   health_tol: float | None = None) -> Trajectory:
    """One full run: prep (or encoded injection), cycles, final readout.

    ``state`` is a cardinal label or an (alpha, beta) amplitude pair.  The
    amplitude pair is injected error-free before the first cycle and read
    out in the computational basis.  ``engine="fast"`` runs the
    pair-structured engine instead of the schedule walker; it draws the
    same random variates in the same order, so the declared bits match.
    """
    if engine == "fast":
        if backend != "dm":
            raise ValueError("the fast engine is a density-matrix engine")
        from . import fast
        eng = fast.FastRingEngine(params=params, table=table, dtype=dtype)
        rng = trajectory_rng(seed, domain, index)
        return eng.run(state, n_cycles, rng, seed=seed, index=index,
                       health_tol=health_tol)
    if engine != "generic":
        raise ValueError(f"unknown engine {engine!r}")
    ex = Executor(10, backend=backend, params=params, table=table, dtype=dtype)
    if isinstance(state, str) and state.endswith("_L"):
        # exact codeword injection: no preparation stage, the timeline
        # starts at the first cycle, readout in the computational basis
        label = state
        if schedule is None:
            schedule = circuits.encoded_experiment(n_cycles)
        sv = embed_data_state(codes.exact_logical_init(state[:-2]))
        psi = PauliState.from_statevector(sv.amps, dtype=dtype) if backend == "dm" else sv
        t0 = 0.0
    elif isinstance(state, str):
        label = state
        if schedule is None:
            schedule = circuits.five_qubit_experiment(state, n_cycles)
        psi = ex.fresh_state()
        t0 = circuits.T_1Q
    else:
        alpha, beta = state
        label = f"enc({alpha:.6g},{beta:.6g})"
        if schedule is None:
            schedule = circuits.encoded_experiment(n_cycles)
        sv = embed_data_state(codes.encoding_circuit(alpha, beta))
        psi = PauliState.from_statevector(sv.amps, dtype=dtype) if backend == "dm" else sv
        t0 = 0.0
    rng = trajectory_rng(seed, domain, index)
    snap_times = [t0 + c * circuits.CYCLE_NS for c in range(1, n_cycles + 1)]

    def snap(s):
        _health_check(s, health_tol)
        return logical_bloch(s)

    events, snaps = ex.run(schedule, psi, rng, snap_times, snap)

    anc = [e for e in events if e.site % 2 == 1]
    fin = [e for e in events if e.site % 2 == 0]
    if len(anc) != 5 * n_cycles or len(fin) != 5:
        raise RuntimeError("unexpected measurement record shape")
    ancilla_bits = np.array([e.declared for e in anc], dtype=np.uint8).reshape(n_cycles, 5)
    final_bits = np.array([e.declared for e in fin], dtype=np.uint8)
    return Trajectory(label, n_cycles, ancilla_bits, final_bits,
                      np.array(snaps), seed, index)


# ----------------------------------------------------------------------
# Ensembles
# ----------------------------------------------------------------------

@dataclass
class Ensemble:
    state: str
    n_cycles: int
    ancilla_bits: np.ndarray   # (n, k, 5)
    final_bits: np.ndarray     # (n, 5)
    bloch: np.ndarray          # (n, k, 3)
    seed: int

    @property
    def ub_fidelity(self) -> np.ndarray:
        """Mean upper-bound fidelity per cycle, shape (k,)."""
        return upper_bound_fidelity(self.bloch).mean(axis=0)

    @property
    def ub_stderr(self) -> np.ndarray:
        """Standard error of the per-cycle mean, shape (k,)."""
        fid = upper_bound_fidelity(self.bloch)
        return fid.std(axis=0, ddof=1) / np.sqrt(fid.shape[0])


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("RINGSIM_JOBS", "1")))
    except ValueError:
        return 1


def _worker(args) -> list[tuple]:
    (state, n_cycles, params, table, seed, domain, backend, dtype_name,
     engine, lo, hi) = args
    dtype = np.dtype(dtype_name).type
    out = []
    if engine == "fast":
        from . import fast
        eng = fast.FastRingEngine(params=params, table=table, dtype=dtype)
        for i in range(lo, hi):
            rng = trajectory_rng(seed, domain, i)
            t = eng.run(state, n_cycles, rng, seed=seed, index=i)
            out.append((t.ancilla_bits, t.final_bits, t.bloch))
        return out
    if isinstance(state, str) and not state.endswith("_L"):
        schedule = circuits.five_qubit_experiment(state, n_cycles)
    else:
        schedule = circuits.encoded_experiment(n_cycles)
    for i in range(lo, hi):
        t = run_trajectory(state, n_cycles, params=params, table=table,
                           seed=seed, index=i, domain=domain, backend=backend,
                           dtype=dtype, schedule=schedule)
        out.append((t.ancilla_bits, t.final_bits, t.bloch))
    return out


def run_ensemble(state, n_cycles: int, n_traj: int, *, params=None, table=None,
                 seed: int = 0, domain: int = 0, backend: str = "dm",
                 dtype=np.float64, engine: str = "generic",
                 n_jobs: int | None = None) -> Ensemble:
    """n_traj independent trajectories, stacked in index order.

    The per-trajectory seed streams make the result independent of
    ``n_jobs``; chunking only changes who does the work.
    """
    if n_jobs is None:
        n_jobs = default_jobs()
    label = state if isinstance(state, str) else f"enc({state[0]:.6g},{state[1]:.6g})"
    dtype_name = np.dtype(dtype).name
    if n_jobs <= 1 or n_traj == 1:
        chunks = [(0, n_traj)]
    else:
        step = -(-n_traj // n_jobs)
        chunks = [(a, min(a + step, n_traj)) for a in range(0, n_traj, step)]
    argsets = [(state, n_cycles, params, table, seed, domain, backend,
                dtype_name, engine, lo, hi) for lo, hi in chunks]
    if len(argsets) == 1:
        parts = [_worker(argsets[0])]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(_worker, argsets))
    rows = [r for part in parts for r in part]
    ancilla = np.stack([r[0] for r in rows])
    final = np.stack([r[1] for r in rows])
    bloch = np.stack([r[2] for r in rows])
    return Ensemble(label, n_cycles, ancilla, final, bloch, seed)
