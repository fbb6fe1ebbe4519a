"""Statevector oracle for the circuit semantics of the ring cycle.

These tests pin down the whole syndrome-extraction story with ideal gates:
codewords give deterministic trivial syndromes, injected Pauli errors trip
exactly the generators they anticommute with, errors drift four positions
per cycle without changing type, and the planar-code benchmark circuit
reproduces its stabilizer patterns.
"""

import numpy as np
import pytest

from ringsim import circuits, codes, noise, runner
from ringsim.statevec import StateVector

IDEAL = noise.NoiseParams.ideal()
IDEAL_TABLE = noise.MeasurementErrorTable.ideal()

_PAULI_IDX = {"X": 1, "Y": 2, "Z": 3}


def _sv_executor(n):
    return runner.Executor(n, backend="sv", params=IDEAL, table=IDEAL_TABLE)


def _embedded_codeword(label):
    return runner.embed_data_state(codes.exact_logical_init(label))


def _run(schedule, psi, seed=1, snaps=()):
    ex = _sv_executor(psi.n)
    rng = runner.trajectory_rng(seed, 0, 0)
    return ex.run(schedule, psi, rng, snaps, runner.logical_bloch)


def _ancilla_rows(events, k):
    anc = [e for e in events if e.site % 2 == 1]
    assert len(anc) == 5 * k
    for c in range(k):
        row = anc[5 * c:5 * (c + 1)]
        assert [e.site for e in row] == list(circuits.ANCILLA_SITES)
        yield c + 1, row


def test_iswap_with_virtual_correction_is_swap_cz():
    sdg2 = np.kron(runner._SDG, runner._SDG)
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
                    dtype=complex)
    np.testing.assert_allclose(sdg2 @ runner._ISWAP, swap @ runner._CZ, atol=1e-15)


@pytest.mark.parametrize("label", codes.CARDINAL_STATES)
def test_codeword_syndromes_trivial_and_bloch_preserved(label):
    k = 4
    sched = circuits.encoded_experiment(k)
    psi = _embedded_codeword(label)
    events, snaps = _run(sched, psi, snaps=[c * circuits.CYCLE_NS for c in range(1, k + 1)])
    for _, row in _ancilla_rows(events, k):
        assert all(e.declared == 0 for e in row)
    target = np.tile(codes.CARDINAL_BLOCH[label], (k, 1))
    np.testing.assert_allclose(np.array(snaps), target, atol=1e-12)


def test_injected_paulis_trip_their_generators_every_cycle():
    k = 3
    sched = circuits.encoded_experiment(k)
    for p in "XYZ":
        for l in range(5):
            err = "".join(p if j == l else "I" for j in range(5))
            expected = {j for j, b in enumerate(codes.syndrome_of_error(err)) if b}
            psi = _embedded_codeword("0")
            flip = [0] * 10
            flip[2 * l] = _PAULI_IDX[p]
            psi.apply_pauli(flip)
            events, _ = _run(sched, psi)
            for c, row in _ancilla_rows(events, k):
                got = {circuits.generator_at(e.site, c)
                       for e in row if e.declared == 1}
                assert got == expected, f"{p}@D{l} cycle {c}"


@pytest.mark.parametrize("p", ["X", "Y", "Z"])
def test_errors_drift_four_positions_per_cycle_without_changing_type(p):
    one = circuits.Schedule(10)
    circuits.five_qubit_cycle(one, 0.0)
    one.validate()
    for v in (0, 6):
        clean = _embedded_codeword("+")
        _run(one, clean, seed=3)
        dirty = _embedded_codeword("+")
        flip = [0] * 10
        flip[v] = _PAULI_IDX[p]
        dirty.apply_pauli(flip)
        _run(one, dirty, seed=3)
        shifted = [0] * 10
        shifted[(v + 4) % 10] = _PAULI_IDX[p]
        clean.apply_pauli(shifted)
        assert abs(clean.fidelity_with(dirty) - 1.0) < 1e-12


def test_final_readout_parity_flags_bit_flips():
    sched = circuits.encoded_experiment(2)
    for err_label, want in ((None, 0), (0, 1), (3, 1)):
        psi = _embedded_codeword("0")
        if err_label is not None:
            flip = [0] * 10
            flip[2 * err_label] = 1
            psi.apply_pauli(flip)
        events, _ = _run(sched, psi, seed=11)
        bits = [e.declared for e in events if e.site % 2 == 0]
        assert len(bits) == 5
        assert sum(bits) % 2 == want


@pytest.mark.parametrize("label", codes.CARDINAL_STATES)
def test_prepared_cardinal_states_keep_their_bloch_vector(label):
    t = runner.run_trajectory(label, 3, params=IDEAL, table=IDEAL_TABLE,
                              seed=5, backend="sv")
    target = np.tile(codes.CARDINAL_BLOCH[label], (3, 1))
    np.testing.assert_allclose(t.bloch, target, atol=1e-12)
    np.testing.assert_allclose(t.ub_fidelity, np.ones(3), atol=1e-12)


def test_syndrome_is_stable_in_the_generator_frame():
    for label in ("0", "+", "i-"):
        t = runner.run_trajectory(label, 4, params=IDEAL, table=IDEAL_TABLE,
                                  seed=5, backend="sv")
        g = runner.to_generator_frame(t.ancilla_bits)
        for c in range(1, 4):
            assert np.array_equal(g[c], g[0])


def test_noiseless_density_matrix_agrees_with_statevector():
    for label in ("0", "+", "i+"):
        tsv = runner.run_trajectory(label, 2, params=IDEAL, table=IDEAL_TABLE,
                                    seed=5, backend="sv")
        tdm = runner.run_trajectory(label, 2, params=IDEAL, table=IDEAL_TABLE,
                                    seed=5, backend="dm")
        assert np.array_equal(tsv.ancilla_bits, tdm.ancilla_bits)
        assert np.array_equal(tsv.final_bits, tdm.final_bits)
        np.testing.assert_allclose(tdm.bloch, tsv.bloch, atol=1e-9)


class TestSurface17:
    def _embedded_zero(self):
        return runner.embed_surface17(codes.surface17_logical_zero())

    def test_logical_zero_is_deterministically_quiet(self):
        sched = circuits.surface17_experiment(2)
        psi = self._embedded_zero()
        ex = _sv_executor(17)
        rng = runner.trajectory_rng(2, 0, 0)
        events, _ = ex.run(sched, psi, rng, [], None)
        assert len(events) == 16
        assert all(e.declared == 0 for e in events)
        zl = [0] * 17
        for q in (0, 1, 2):
            zl[q] = 3
        assert abs(psi.expectation_pauli(zl) - 1.0) < 1e-9

    def test_single_errors_reproduce_stabilizer_patterns(self):
        sched = circuits.surface17_experiment(1)
        for p in "XYZ":
            for d in range(9):
                err = "".join(p if j == d else "I" for j in range(9))
                expected = {a for a, b in
                            enumerate(codes.surface17_syndrome_of_error(err)) if b}
                psi = self._embedded_zero()
                flip = [0] * 17
                flip[d] = _PAULI_IDX[p]
                psi.apply_pauli(flip)
                ex = _sv_executor(17)
                rng = runner.trajectory_rng(2, 0, 0)
                events, _ = ex.run(sched, psi, rng, [], None)
                got = {e.site - 9 for e in events if e.declared == 1}
                assert got == expected, f"{p}@{d}"
