"""Pauli algebra and PTM conversion checks against dense linear algebra."""

import numpy as np
import pytest

from ringsim import pauli


def random_unitary(d, rng):
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(h)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestAlgebra:
    def test_product_table_matches_dense(self):
        for a in range(4):
            for b in range(4):
                phase_exp, prod = pauli.multiply((a,), (b,))
                dense = pauli.SINGLE[a] @ pauli.SINGLE[b]
                expected = (1j**phase_exp) * pauli.SINGLE[prod[0]]
                np.testing.assert_allclose(dense, expected, atol=1e-15)

    def test_multiword_product(self):
        phase_exp, prod = pauli.multiply(pauli.parse_label("XYZ"), pauli.parse_label("YYX"))
        dense = pauli.string_matrix("XYZ") @ pauli.string_matrix("YYX")
        np.testing.assert_allclose(dense, (1j**phase_exp) * pauli.string_matrix(pauli.format_label(prod)), atol=1e-14)

    def test_commutes_matches_dense(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a = tuple(rng.integers(0, 4, size=3))
            b = tuple(rng.integers(0, 4, size=3))
            ma, mb = pauli.string_matrix(pauli.format_label(a)), pauli.string_matrix(pauli.format_label(b))
            dense_commutes = np.allclose(ma @ mb, mb @ ma)
            assert pauli.commutes(a, b) == dense_commutes

    def test_label_roundtrip_and_index(self):
        for label in ("I", "XY", "ZIX", "YYYY"):
            parsed = pauli.parse_label(label)
            assert pauli.format_label(parsed) == label
            # index is big-endian base 4 with qubit 0 most significant
            idx = pauli.string_index(parsed)
            assert pauli.index_string(idx, len(label)) == parsed

    def test_string_matrix_ordering(self):
        # qubit 0 is the left factor of the Kronecker product
        np.testing.assert_array_equal(
            pauli.string_matrix("XZ"), np.kron(pauli.SINGLE[1], pauli.SINGLE[3])
        )

    def test_weight(self):
        assert pauli.weight(pauli.parse_label("IXIZ")) == 2
        assert pauli.weight(pauli.parse_label("II")) == 0


class TestPtmConversion:
    def test_identity_ptm(self):
        np.testing.assert_allclose(pauli.unitary_ptm(np.eye(4)), np.eye(16), atol=1e-14)

    def test_unitary_ptm_is_orthogonal(self):
        rng = np.random.default_rng(11)
        for n in (1, 2):
            u = random_unitary(2**n, rng)
            r = pauli.unitary_ptm(u)
            np.testing.assert_allclose(r @ r.T, np.eye(4**n), atol=1e-10)
            np.testing.assert_allclose(r[0], np.eye(4**n)[0], atol=1e-12)

    def test_kraus_ptm_matches_unitary_ptm(self):
        rng = np.random.default_rng(13)
        u = random_unitary(4, rng)
        np.testing.assert_allclose(pauli.kraus_ptm([u]), pauli.unitary_ptm(u), atol=1e-12)

    def test_kraus_ptm_trace_preserving(self):
        # amplitude damping has a non-trivial first column but identity first row
        g = 0.3
        kraus = [np.diag([1.0, np.sqrt(1 - g)]), np.array([[0, np.sqrt(g)], [0, 0]])]
        r = pauli.kraus_ptm(kraus)
        np.testing.assert_allclose(r[0], [1, 0, 0, 0], atol=1e-14)

    def test_choi_positive_for_channel(self):
        g = 0.25
        kraus = [np.diag([1.0, np.sqrt(1 - g)]), np.array([[0, np.sqrt(g)], [0, 0]])]
        choi = pauli.ptm_to_choi(pauli.kraus_ptm(kraus))
        evals = np.linalg.eigvalsh(choi)
        assert evals.min() > -1e-12
        assert abs(np.trace(choi).real - 2.0) < 1e-12

    def test_choi_of_unitary_is_rank_one(self):
        rng = np.random.default_rng(17)
        choi = pauli.ptm_to_choi(pauli.unitary_ptm(random_unitary(2, rng)))
        evals = np.sort(np.linalg.eigvalsh(choi))
        np.testing.assert_allclose(evals, [0, 0, 0, 2], atol=1e-10)

    def test_transposition_map_is_not_cp(self):
        # PTM of the transpose map: flips the sign of Y only
        r = np.diag([1.0, 1.0, -1.0, 1.0])
        assert np.linalg.eigvalsh(pauli.ptm_to_choi(r)).min() < -0.5
