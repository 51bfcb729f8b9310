import math

import numpy as np
from django.test import SimpleTestCase
from scipy import linalg as sp_linalg

from zerofield.exceptions import PhysicsError
from zerofield.linalg import (
    axis_operator, cnot_matrix, expm_hermitian, gate_fidelity, is_hermitian, is_unitary, kron, rotation,
    spin_operator,
)


def taylor_expm(hamiltonian, t, terms=40):
    """e^{-iHt} by scaling and squaring of a truncated Taylor series."""
    a = -1j * t * np.asarray(hamiltonian, dtype=complex)
    squarings = max(0, int(math.ceil(math.log2(max(np.linalg.norm(a), 1.0)))) + 1)
    a = a / 2 ** squarings
    result = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


class SpinOperatorTests(SimpleTestCase):
    def test_single_spin_matrices(self):
        np.testing.assert_array_equal(spin_operator(1, 'z', 1), np.diag([0.5, -0.5]))
        np.testing.assert_array_equal(spin_operator(1, 'x', 1), [[0, 0.5], [0.5, 0]])

    def test_second_spin_is_least_significant(self):
        np.testing.assert_array_equal(spin_operator(2, 'z', 2), np.diag([0.5, -0.5, 0.5, -0.5]))
        np.testing.assert_array_equal(spin_operator(1, 'z', 2), np.diag([0.5, 0.5, -0.5, -0.5]))

    def test_hermitian_traceless_with_half_eigenvalues(self):
        for n in (1, 2, 3):
            for k in range(1, n + 1):
                for axis in 'xyz':
                    op = spin_operator(k, axis, n)
                    self.assertLessEqual(np.abs(op - op.conj().T).max(), 1e-14)
                    self.assertLessEqual(abs(np.trace(op)), 1e-14)
                    eigenvalues = np.linalg.eigvalsh(op)
                    self.assertEqual(int(np.sum(np.isclose(eigenvalues, 0.5))), 2 ** (n - 1))
                    self.assertEqual(int(np.sum(np.isclose(eigenvalues, -0.5))), 2 ** (n - 1))

    def test_operators_are_read_only(self):
        with self.assertRaises(ValueError):
            spin_operator(1, 'z', 2)[0, 0] = 3

    def test_rejects_bad_index_and_size(self):
        with self.assertRaises(PhysicsError):
            spin_operator(0, 'z', 2)
        with self.assertRaises(PhysicsError):
            spin_operator(3, 'z', 2)
        with self.assertRaises(PhysicsError):
            spin_operator(1, 'z', 9)
        with self.assertRaises(PhysicsError):
            spin_operator(1, 'w', 2)


class AxisOperatorTests(SimpleTestCase):
    def test_weighted_sum_over_spins(self):
        axis = (0.6, 0.0, 0.8)
        expected = sum(
            c * spin_operator(k, ax, 3) for k in (1, 3) for c, ax in zip(axis, 'xyz')
        )
        np.testing.assert_allclose(axis_operator((1, 3), axis, 3), expected, atol=1e-15)

    def test_hermiticity_check(self):
        self.assertTrue(is_hermitian(axis_operator((1, 2), (0.0, 1.0, 0.0), 2)))
        self.assertTrue(is_hermitian(np.zeros((4, 4))))
        self.assertFalse(is_hermitian(1j * np.eye(2)))
        self.assertFalse(is_hermitian(np.array([[0, 1], [0, 0]], dtype=complex)))


class KronTests(SimpleTestCase):
    def test_identities(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_leftmost_factor_is_most_significant(self):
        np.testing.assert_array_equal(
            kron(spin_operator(1, 'z', 1), np.eye(2)), np.diag([0.5, 0.5, -0.5, -0.5]),
        )

    def test_index_formula(self):
        a = spin_operator(1, 'x', 1)
        product = kron(a, a)
        for i in range(4):
            for j in range(4):
                self.assertEqual(product[i, j], a[i // 2, j // 2] * a[i % 2, j % 2])

    def test_associative(self):
        rng = np.random.default_rng(3)
        a, b, c = (rng.normal(size=(2, 2)) for _ in range(3))
        np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-14)


class ExpmHermitianTests(SimpleTestCase):
    def test_zero_matrix_gives_identity(self):
        np.testing.assert_array_equal(expm_hermitian(np.zeros((4, 4)), 3.7), np.eye(4))

    def test_diagonal_exponential(self):
        theta = 0.83
        expected = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
        np.testing.assert_allclose(expm_hermitian(spin_operator(1, 'z', 1), theta), expected, atol=1e-14)

    def test_matches_taylor_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            h = random_hermitian(rng, 8)
            self.assertLessEqual(np.linalg.norm(expm_hermitian(h, 1.0) - taylor_expm(h, 1.0)), 1e-10)
            self.assertLessEqual(np.linalg.norm(expm_hermitian(h, 1.0) - sp_linalg.expm(-1j * h)), 1e-10)

    def test_group_property_and_unitarity(self):
        rng = np.random.default_rng(5)
        h = random_hermitian(rng, 8)
        combined = expm_hermitian(h, 0.3) @ expm_hermitian(h, 0.45)
        self.assertLessEqual(np.linalg.norm(combined - expm_hermitian(h, 0.75)), 1e-10)
        self.assertTrue(is_unitary(combined))

    def test_commuting_sum_factorizes(self):
        h1 = spin_operator(1, 'x', 2)
        h2 = spin_operator(2, 'z', 2)
        np.testing.assert_allclose(
            expm_hermitian(h1 + h2, 1.3), expm_hermitian(h1, 1.3) @ expm_hermitian(h2, 1.3), atol=1e-10,
        )

    def test_rejects_non_hermitian(self):
        with self.assertRaises(PhysicsError):
            expm_hermitian(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)
        with self.assertRaises(PhysicsError):
            expm_hermitian(np.zeros((2, 3)), 1.0)


class GateFidelityTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(7)
        self.u = expm_hermitian(random_hermitian(rng, 4), 1.0)
        self.v = expm_hermitian(random_hermitian(rng, 4), 1.0)

    def test_self_and_global_phase(self):
        self.assertAlmostEqual(gate_fidelity(self.u, self.u), 1.0, places=12)
        self.assertAlmostEqual(gate_fidelity(self.u, np.exp(0.7j) * self.u), 1.0, places=12)

    def test_identity_against_cnot(self):
        self.assertAlmostEqual(gate_fidelity(np.eye(4), cnot_matrix(2, 1, 2)), 0.5, places=14)

    def test_symmetric_and_left_invariant(self):
        self.assertAlmostEqual(gate_fidelity(self.u, self.v), gate_fidelity(self.v, self.u), places=12)
        w = cnot_matrix(2, 2, 1)
        self.assertAlmostEqual(gate_fidelity(w @ self.u, w @ self.v), gate_fidelity(self.u, self.v), places=12)

    def test_dimension_mismatch(self):
        with self.assertRaises(PhysicsError):
            gate_fidelity(np.eye(2), np.eye(4))


class GateMatrixTests(SimpleTestCase):
    def test_cnot_textbook_form(self):
        expected = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        np.testing.assert_allclose(cnot_matrix(2, 1, 2), expected, atol=1e-15)

    def test_rotation_about_x(self):
        theta = math.pi / 3
        expected = np.array([
            [math.cos(theta / 2), -1j * math.sin(theta / 2)],
            [-1j * math.sin(theta / 2), math.cos(theta / 2)],
        ])
        np.testing.assert_allclose(rotation(1, (1,), (1, 0, 0), theta), expected, atol=1e-14)
