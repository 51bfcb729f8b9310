"""
Dense operator kernel for n spin-1/2 nuclei.

Basis: spin 1 is the leftmost tensor factor and |0> is the I_z = +1/2 state,
so the CNOT of a two-spin system comes out in its textbook form.
"""

from __future__ import annotations

import logging
from functools import lru_cache, reduce

import numpy as np
from scipy import linalg

from .exceptions import PhysicsError

logger = logging.getLogger(__name__)

MAX_SPINS = 8
HERMITICITY_TOLERANCE = 1e-12
UNITARITY_TOLERANCE = 1e-10

AXES = ('x', 'y', 'z')

_IDENTITY = np.eye(2, dtype=complex)
_SPIN_HALF = {
    'x': np.array([[0, 0.5], [0.5, 0]], dtype=complex),
    'y': np.array([[0, -0.5j], [0.5j, 0]], dtype=complex),
    'z': np.array([[0.5, 0], [0, -0.5]], dtype=complex),
}


def _check_spin_count(n):
    if not 1 <= n <= MAX_SPINS:
        raise PhysicsError(f'spin count must be between 1 and {MAX_SPINS}, got {n}')


def kron(a, b):
    """Tensor product a (x) b, with a as the more significant factor."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


@lru_cache(maxsize=None)
def spin_operator(spin_index, axis, n):
    """I_{spin_index, axis} embedded in the 2^n space (read-only array)."""
    _check_spin_count(n)
    if not 1 <= spin_index <= n:
        raise PhysicsError(f'spin index {spin_index} out of range 1..{n}')
    if axis not in _SPIN_HALF:
        raise PhysicsError(f'unknown axis {axis!r}; expected one of x, y, z')
    factors = [_IDENTITY] * n
    factors[spin_index - 1] = _SPIN_HALF[axis]
    operator = reduce(kron, factors)
    operator.flags.writeable = False
    return operator


def identity(n):
    _check_spin_count(n)
    return np.eye(2 ** n, dtype=complex)


def axis_operator(spins, axis, n):
    """Sum over `spins` of n.I_s for a unit vector `axis`."""
    ax = np.asarray(axis, dtype=float)
    total = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for spin in spins:
        for component, name in zip(ax, AXES):
            if component != 0.0:
                total = total + component * spin_operator(spin, name, n)
    return total


def is_hermitian(matrix):
    matrix = np.asarray(matrix)
    scale = np.linalg.norm(matrix)
    return np.linalg.norm(matrix - matrix.conj().T) <= HERMITICITY_TOLERANCE * max(scale, 1e-300)


def is_unitary(matrix, tolerance=UNITARITY_TOLERANCE):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return np.linalg.norm(matrix.conj().T @ matrix - np.eye(matrix.shape[0])) <= tolerance


def expm_hermitian(hamiltonian, t):
    """e^{-iHt} through the eigendecomposition of the Hermitian matrix H."""
    hamiltonian = np.asarray(hamiltonian, dtype=complex)
    if hamiltonian.ndim != 2 or hamiltonian.shape[0] != hamiltonian.shape[1]:
        raise PhysicsError(f'Hamiltonian must be square, got shape {hamiltonian.shape}')
    if not is_hermitian(hamiltonian):
        raise PhysicsError('Hamiltonian is not Hermitian within the relative tolerance 1e-12')
    if not np.any(hamiltonian):
        return np.eye(hamiltonian.shape[0], dtype=complex)
    # a parte anti-hermitiana residual é descartada antes do eigh
    hermitian = 0.5 * (hamiltonian + hamiltonian.conj().T)
    eigenvalues, eigenvectors = linalg.eigh(hermitian)
    return (eigenvectors * np.exp(-1j * eigenvalues * t)) @ eigenvectors.conj().T


def rotation(n, spins, axis, angle):
    """exp(-i angle sum_{s in spins} n.I_s) for a unit vector `axis`."""
    _check_spin_count(n)
    if angle == 0.0 or not spins:
        return identity(n)
    return expm_hermitian(axis_operator(spins, axis, n), angle)


def cnot_matrix(n, control, target):
    """Controlled-NOT in the I_z basis: (1/2 + I_cz) + (1/2 - I_cz) 2 I_tx."""
    if control == target:
        raise PhysicsError('control and target must be different spins')
    half = 0.5 * identity(n)
    i_cz = spin_operator(control, 'z', n)
    return (half + i_cz) + (half - i_cz) @ (2.0 * spin_operator(target, 'x', n))


def gate_fidelity(u_ideal, u):
    """|Tr(U_ideal^dagger U)| / 2^n, insensitive to global phase."""
    u_ideal = np.asarray(u_ideal, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if u_ideal.shape != u.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise PhysicsError(f'dimension mismatch: {u_ideal.shape} vs {u.shape}')
    overlap = abs(np.vdot(u_ideal, u)) / u.shape[0]
    return float(min(overlap, 1.0))
