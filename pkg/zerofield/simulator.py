"""
Exact propagation of piecewise-constant sequences and fidelity reports.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .compiler import CompileMode, compile_decoupling
from .exceptions import PhysicsError
from .linalg import AXES, axis_operator, expm_hermitian, gate_fidelity, is_unitary, rotation
from .sequences import EventKind
from .spins import build_dc_hamiltonian, build_zero_field_hamiltonian, pair_hamiltonian

logger = logging.getLogger(__name__)

SWITCH_TOLERANCE = 1e-9
PROPAGATOR_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PhysicsConfig:
    include_j_during_pulses: bool = False
    honor_ideal_gates: bool = True

    def describe(self):
        j_state = 'on' if self.include_j_during_pulses else 'off'
        gates = 'honored' if self.honor_ideal_gates else 'rejected'
        return f'J during pulses: {j_state}; ideal gates: {gates}'


@dataclass(frozen=True, eq=False)
class FidelityReport:
    fidelity: float
    realized: np.ndarray
    ideal: np.ndarray
    config: PhysicsConfig
    total_duration: float
    reference: float | None = None

    @property
    def reference_delta(self):
        """Computed minus quoted fidelity, when a quoted value was given."""
        if self.reference is None:
            return None
        return self.fidelity - self.reference

    def as_record(self):
        return {
            'fidelity': round(self.fidelity, 12),
            'total_duration': self.total_duration,
            'include_j_during_pulses': self.config.include_j_during_pulses,
            'honor_ideal_gates': self.config.honor_ideal_gates,
            'reference': self.reference,
            'reference_delta': self.reference_delta,
        }


def simulate(system, sequence, config=None):
    """Ordered product of the segment propagators, first event rightmost."""
    config = config or PhysicsConfig()
    if sequence.target.shape != (system.dim, system.dim):
        raise PhysicsError(
            f'sequence acts on {sequence.n_spins} spins but the system has {system.n}'
        )
    h_zero = build_zero_field_hamiltonian(system)
    # memo por chamada: blocos de desacoplamento repetem os mesmos segmentos
    memo = {}
    unitary = np.eye(system.dim, dtype=complex)
    for event in sequence.events:
        if event.kind == EventKind.DELAY:
            key = ('delay', event.duration)
            if key not in memo:
                memo[key] = expm_hermitian(h_zero, event.duration)
        elif event.kind == EventKind.DC_PULSE:
            key = ('dc_pulse', event.field.components, event.duration, config.include_j_during_pulses)
            if key not in memo:
                hamiltonian = build_dc_hamiltonian(system, event.field)
                if config.include_j_during_pulses:
                    hamiltonian = hamiltonian + h_zero
                memo[key] = expm_hermitian(hamiltonian, event.duration)
        else:
            if not config.honor_ideal_gates:
                raise PhysicsError('sequence contains ideal gates but honor_ideal_gates is off')
            key = ('ideal_gate', event.spins, event.axis, event.angle)
            if key not in memo:
                memo[key] = rotation(system.n, event.spins, event.axis, event.angle)
        unitary = memo[key] @ unitary
    logger.debug('simulated %d events with %d distinct propagators', len(sequence), len(memo))
    if not is_unitary(unitary, PROPAGATOR_TOLERANCE):
        raise PhysicsError(f'propagator drifted from unitarity after {len(sequence)} events')
    return unitary


def evaluate_gate(system, sequence, ideal=None, config=None, reference=None):
    config = config or PhysicsConfig()
    ideal = sequence.target if ideal is None else np.asarray(ideal, dtype=complex)
    realized = simulate(system, sequence, config)
    return FidelityReport(
        fidelity=gate_fidelity(ideal, realized),
        realized=realized,
        ideal=ideal,
        config=config,
        total_duration=sequence.total_duration,
        reference=reference,
    )


def _toggled_sum(system, theta, axes):
    h_zero = build_zero_field_hamiltonian(system)
    total = h_zero.copy()
    spins = range(1, system.n + 1)
    for axis in axes:
        generator = sum(angle * axis_operator((k,), _unit(axis), system.n) for k, angle in zip(spins, theta))
        u = expm_hermitian(generator, 1.0) if np.any(generator) else np.eye(system.dim)
        total = total + u @ h_zero @ u.conj().T
    return total


def _unit(axis):
    return tuple(1.0 if name == axis else 0.0 for name in AXES)


def average_hamiltonian_check(system, theta, axes=AXES):
    """H0 + sum over axes of U_a(theta) H0 U_a(theta)^dagger, U_a = prod_k exp(-i theta_k I_ka)."""
    theta = [float(angle) for angle in theta]
    if len(theta) != system.n:
        raise PhysicsError(f'expected {system.n} angles, got {len(theta)}')
    if not all(math.isfinite(angle) for angle in theta):
        raise PhysicsError('angles must be finite')
    return _toggled_sum(system, theta, axes)


def coupling_switches(theta):
    """Per pair: True when theta_i - theta_j is an even multiple of pi, False when odd, None otherwise."""
    switches = {}
    for (i, a), (j, b) in combinations(enumerate(theta, start=1), 2):
        ratio = (a - b) / math.pi
        nearest = round(ratio)
        if abs(ratio - nearest) > SWITCH_TOLERANCE:
            switches[(i, j)] = None
        else:
            switches[(i, j)] = nearest % 2 == 0
    return switches


def predicted_average_hamiltonian(system, theta):
    """4 times the sum of the pair Hamiltonians that stay switched on."""
    switches = coupling_switches(theta)
    if any(state is None for state in switches.values()):
        raise PhysicsError('the on/off rule only covers angle differences at multiples of pi')
    total = np.zeros((system.dim, system.dim), dtype=complex)
    for (i, j), on in switches.items():
        if on and system.coupling(i, j) != 0.0:
            total = total + 4 * pair_hamiltonian(system, i, j)
    return total


def verify_coupling_switches(system, theta, tolerance=1e-10):
    """Whether the toggled sum matches the on/off prediction to `tolerance` (Frobenius)."""
    difference = average_hamiltonian_check(system, theta) - predicted_average_hamiltonian(system, theta)
    return float(np.linalg.norm(difference)) <= tolerance


def trotter_convergence_probe(system, keep_pair, tau0, subdivisions=(1, 2, 4, 8)):
    """Fidelity of m decoupling cycles of step tau0/m against their zero-order target."""
    curve = []
    for m in subdivisions:
        if m < 1:
            raise PhysicsError(f'subdivision count must be at least 1, got {m}')
        block = compile_decoupling(system, keep_pair, tau0 / m, CompileMode.IDEAL)
        cycle = simulate(system, block)
        realized = np.linalg.matrix_power(cycle, m)
        target = np.linalg.matrix_power(block.target, m)
        curve.append((m, gate_fidelity(target, realized)))
    logger.debug('trotter probe %s', curve)
    return curve
