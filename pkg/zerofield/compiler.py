"""
Gate compilation into DC pulses and free evolutions.

Three modes:
  ideal    - single-qubit factors and pi flips stay as ideal_gate events;
  compiled - the single-qubit factors of a CNOT become DC pulses, while the
             pi flips of the U_zz echo and of the decoupling cycle stay
             ideal_gate events;
  full     - every factor becomes DC pulses whose durations come from the
             pulse designer.
Standalone single-qubit gates, pi flips, U_zz blocks and decoupling cycles
compile to DC pulses in both compiled and full modes.
Couplings are neglected while a DC pulse is on (|B| >> |2 pi J / gamma|).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping

import numpy as np
import pandas as pd
from django.db import models

from .exceptions import PhysicsError
from .linalg import cnot_matrix, expm_hermitian, rotation, spin_operator
from .pulses import DesignSolution, design_selective_pi
from .sequences import PulseEvent, Sequence, empty_sequence, perpendicular_axis, unit_axis
from .spins import FieldVector, default_magnitude, pair_hamiltonian, regime_ratio

logger = logging.getLogger(__name__)

X_AXIS = (1.0, 0.0, 0.0)
Y_AXIS = (0.0, 1.0, 0.0)
Z_AXIS = (0.0, 0.0, 1.0)

ANGLE_LIMIT = 4 * math.pi
REGIME_WARNING_RATIO = 10.0


class CompileMode(models.TextChoices):
    IDEAL = 'ideal', 'Ideal single-qubit gates'
    COMPILED = 'compiled', 'DC single-qubit factors, ideal echo flips'
    FULL = 'full', 'DC pulses only'


def _flip_mode(mode):
    """Mode for the pi flips inside the U_zz stage of a CNOT."""
    return CompileMode.IDEAL if mode == CompileMode.COMPILED else mode


def _regime(system, magnitude):
    ratio = regime_ratio(system, magnitude)
    if ratio < REGIME_WARNING_RATIO:
        logger.warning(
            'field %.3e T is only %.1f times the strongest coupling; '
            'neglecting J during pulses is a poor approximation', magnitude, ratio,
        )
    return None if math.isinf(ratio) else ratio


def _pick_solution(pi_solutions, spins):
    if pi_solutions is None:
        return None
    if isinstance(pi_solutions, DesignSolution):
        return pi_solutions
    if isinstance(pi_solutions, Mapping):
        return pi_solutions.get(tuple(spins))
    raise PhysicsError('pi_solutions must be a DesignSolution or a mapping of spin tuples to one')


def pi_flip(system, spins, axis, mode, magnitude=None, solution=None, label=''):
    """pi rotation of `spins` about `axis`; its inverse is `pi_flip(...).reversed()`."""
    spins = system.indices(spins)
    target = rotation(system.n, spins, axis, math.pi)
    if mode == CompileMode.IDEAL:
        return Sequence((PulseEvent.ideal_gate(spins, axis, math.pi, label),), target)
    if solution is None:
        solution = design_selective_pi(system, spins, magnitude or default_magnitude())
    if tuple(solution.target_set) != spins:
        raise PhysicsError(f'pi pulse designed for {solution.target_set} used on {spins}')
    # campo -B n gira cada spin k de +gamma_k B t em torno de n
    drive = FieldVector.along(axis, -solution.magnitude)
    return Sequence(
        (PulseEvent.dc_pulse(drive, solution.duration, label),),
        target,
        {'predicted_fidelity': solution.predicted_fidelity},
    )


def compile_single_qubit(system, spin, axis, angle, magnitude, pi_solutions=None,
                         mode=CompileMode.COMPILED):
    """exp(-i angle n.I_spin) as half pulse, spectator flip, half pulse, flip back."""
    s = system.index(spin)
    n_vec = unit_axis(axis)
    if not math.isfinite(angle) or abs(angle) > ANGLE_LIMIT:
        raise PhysicsError(f'angle {angle} outside [-4 pi, 4 pi]; reduce it first')
    if magnitude <= 0:
        raise PhysicsError(f'field magnitude must be positive, got {magnitude}')

    target = rotation(system.n, (s,), n_vec, angle)
    metadata = {
        'construction': 'single_qubit_echo',
        'mode': str(mode),
        'spin': s,
        'axis': list(n_vec),
        'angle': angle,
        'assumption': 'J-couplings neglected during DC pulses',
        'regime_ratio': _regime(system, magnitude),
    }
    if angle == 0.0:
        return empty_sequence(system.n, metadata)

    gamma = system.gammas[s - 1]
    duration = abs(angle) / (abs(gamma) * magnitude)
    drive = FieldVector.along(n_vec, -math.copysign(1.0, angle * gamma) * magnitude)
    spectators = system.others((s,))
    if not spectators:
        return Sequence((PulseEvent.dc_pulse(drive, duration, f'R{s}'),), target, metadata)

    n_perp = perpendicular_axis(n_vec)
    flip = pi_flip(
        system, spectators, n_perp, mode, magnitude,
        _pick_solution(pi_solutions, spectators), label=f'P{"".join(map(str, spectators))}',
    )
    half = PulseEvent.dc_pulse(drive, duration / 2, f'R{s}/2')
    metadata['perpendicular_axis'] = list(n_perp)
    events = (half, *flip.reversed().events, half, *flip.events)
    return Sequence(events, target, metadata)


def decoupling_groups(n, pairs):
    """Spins flipped at each concatenation level: the kept pairs, then the rest in order."""
    kept = {spin for pair in pairs for spin in pair}
    groups = [tuple(sorted(pair)) for pair in pairs]
    groups += [(k,) for k in range(1, n + 1) if k not in kept]
    return groups[:min(max(n - 2, 0), len(groups))]


def _as_pairs(system, keep):
    if len(keep) == 2 and not isinstance(keep[0], (tuple, list)):
        keep = [keep]
    pairs = [tuple(sorted((system.index(a), system.index(b)))) for a, b in keep]
    spins = [spin for pair in pairs for spin in pair]
    if any(a == b for a, b in pairs):
        raise PhysicsError('a kept pair needs two different spins')
    if len(spins) != len(set(spins)):
        raise PhysicsError(f'kept pairs overlap: {pairs}')
    return pairs


def compile_decoupling(system, keep_pair, tau0, mode=CompileMode.IDEAL, magnitude=None):
    """Concatenated cycle X+ P Z+ P X P Z P that keeps only the couplings in `keep_pair`.

    `keep_pair` is one pair or a list of disjoint pairs.
    """
    if system.n < 2:
        raise PhysicsError('decoupling needs at least two spins')
    if not tau0 > 0:
        raise PhysicsError(f'tau0 must be positive, got {tau0}')
    pairs = _as_pairs(system, keep_pair)
    for a, b in pairs:
        if system.coupling(a, b) == 0.0:
            logger.warning('kept pair (%d, %d) has zero coupling; nothing to retain', a, b)

    groups = decoupling_groups(system.n, pairs)
    events = [PulseEvent.delay(tau0)]
    for level, group in enumerate(groups, start=1):
        x = pi_flip(system, group, X_AXIS, mode, magnitude, label=f'X{level}').events
        z = pi_flip(system, group, Z_AXIS, mode, magnitude, label=f'Z{level}').events
        x_dag = tuple(event.inverted() for event in reversed(x))
        z_dag = tuple(event.inverted() for event in reversed(z))
        events = [*x_dag, *events, *z_dag, *events, *x, *events, *z, *events]

    scale = 4 ** len(groups)
    retained = sum(pair_hamiltonian(system, a, b) for a, b in pairs)
    metadata = {
        'construction': 'concatenated_decoupling',
        'mode': str(mode),
        'levels': len(groups),
        'tau0': tau0,
        'retained_pairs': [list(pair) for pair in pairs],
        'average_hamiltonian_scale': scale,
    }
    # alvo = propagador da hamiltoniana média de ordem zero
    return Sequence(tuple(events), expm_hermitian(retained, scale * tau0), metadata)


def _retain_for(system, pairs, duration, mode, magnitude):
    """Decoupling block whose zero-order effect is exp(-i duration sum H0^(pair))."""
    levels = len(decoupling_groups(system.n, pairs))
    return compile_decoupling(system, pairs, duration / 4 ** levels, mode, magnitude)


def _zz_target(system, pairs, angles):
    generator = sum(
        angle * spin_operator(a, 'z', system.n) @ spin_operator(b, 'z', system.n)
        for (a, b), angle in zip(pairs, angles)
    )
    return expm_hermitian(generator, 1.0)


def compile_uzz(system, i, j, angle, mode=CompileMode.IDEAL, magnitude=None):
    """Echo exp(-i H0 t) Z_j exp(-i H0 t) Z_j^dagger with t = angle / (2 pi |J_ij|).

    Realizes exp(-2i sign(J_ij) angle I_iz I_jz); the sign of the coupling
    decides whether this is U_zz or its inverse.
    """
    a, b = system.index(i), system.index(j)
    if a == b:
        raise PhysicsError('U_zz needs two different spins')
    hz = system.coupling(a, b)
    if hz == 0.0:
        raise PhysicsError(f'J({a},{b}) is zero; U_zz cannot be built from free evolution')
    if not math.isfinite(angle) or angle < 0:
        raise PhysicsError(f'U_zz angle must be non-negative, got {angle}')

    target = _zz_target(system, [(a, b)], [2 * math.copysign(angle, hz)])
    duration = angle / (2 * math.pi * abs(hz))
    metadata = {
        'construction': 'uzz_echo',
        'mode': str(mode),
        'pair': [a, b],
        'angle': angle,
        'evolution_time': duration,
        'inverted_by_coupling_sign': hz < 0,
    }
    if angle == 0.0:
        return empty_sequence(system.n, metadata)

    block = _retain_for(system, [(a, b)], duration, mode, magnitude)
    echo = pi_flip(system, (b,), Z_AXIS, mode, magnitude, label=f'E{b}')
    metadata['tau0'] = block.metadata['tau0']
    metadata['levels'] = block.metadata['levels']
    events = (*echo.reversed().events, *block.events, *echo.events, *block.events)
    return Sequence(events, target, metadata)


def _single_factor(system, spins, axis, angle, mode, magnitude):
    if mode == CompileMode.IDEAL:
        return Sequence(
            (PulseEvent.ideal_gate(spins, axis, angle),),
            rotation(system.n, spins, axis, angle),
        )
    parts = [
        compile_single_qubit(system, spin, axis, angle, magnitude or default_magnitude(), mode=mode)
        for spin in spins
    ]
    return parts[0].then(*parts[1:])


def _cnot_plan(control_spins, target_spins, positive):
    """Time-ordered single-qubit factors around the U_zz block.

    For positive couplings CNOT = sqrt(i) Uz_c(pi/2) Uz_t(-pi/2) Ux_t(pi/2) Uzz Uy_t(pi/2);
    for negative ones the inverse is compiled (CNOT is its own inverse).
    """
    half = math.pi / 2
    if positive:
        return (
            [(target_spins, Y_AXIS, half)],
            [(target_spins, X_AXIS, half), (target_spins, Z_AXIS, -half), (control_spins, Z_AXIS, half)],
        )
    return (
        [(control_spins, Z_AXIS, -half), (target_spins, Z_AXIS, half), (target_spins, X_AXIS, -half)],
        [(target_spins, Y_AXIS, -half)],
    )


def _assemble_cnot(system, before, uzz, after, mode, magnitude, target, metadata):
    parts = [_single_factor(system, spins, axis, angle, mode, magnitude) for spins, axis, angle in before]
    parts.append(uzz)
    parts += [_single_factor(system, spins, axis, angle, mode, magnitude) for spins, axis, angle in after]
    sequence = parts[0].then(*parts[1:])
    return Sequence(sequence.events, target, metadata)


def compile_cnot(system, control, target, mode=CompileMode.IDEAL, magnitude=None):
    i, j = system.index(control), system.index(target)
    if i == j:
        raise PhysicsError('control and target must be different spins')
    hz = system.coupling(i, j)
    if hz == 0.0:
        raise PhysicsError(f'J({i},{j}) is zero; CNOT needs a direct coupling')

    uzz = compile_uzz(system, i, j, math.pi / 2, _flip_mode(mode), magnitude)
    before, after = _cnot_plan((i,), (j,), hz > 0)
    metadata = {
        'construction': 'cnot',
        'mode': str(mode),
        'gate': f'cnot:{i}:{j}',
        'pairs': [[i, j]],
        # a fase global sqrt(i) nunca é realizada fisicamente
        'global_phase': '-pi/4' if hz > 0 else 'pi/4',
        'tau0': uzz.metadata['tau0'],
        'levels': uzz.metadata['levels'],
        'evolution_time': uzz.metadata['evolution_time'],
    }
    return _assemble_cnot(system, before, uzz, after, mode, magnitude, cnot_matrix(system.n, i, j), metadata)


def compile_simultaneous_cnot(system, pairs, mode=CompileMode.IDEAL, magnitude=None):
    """CNOTs on disjoint pairs sharing one U_zz stage.

    Pairs with weaker coupling keep evolving alone after the stronger ones are
    done, so every pair gets t = 1 / (4 J) under its own coupling.
    """
    pairs = [(system.index(c), system.index(t)) for c, t in pairs]
    if not pairs:
        raise PhysicsError('at least one (control, target) pair is required')
    spins = [spin for pair in pairs for spin in pair]
    if len(spins) != len(set(spins)):
        raise PhysicsError(f'CNOT pairs overlap: {pairs}')
    for c, t in pairs:
        hz = system.coupling(c, t)
        if hz == 0.0:
            raise PhysicsError(f'J({c},{t}) is zero; CNOT needs a direct coupling')
        if hz < 0 and len(pairs) > 1:
            raise PhysicsError(f'J({c},{t}) is negative; simultaneous CNOTs assume positive couplings')
    if len(pairs) == 1:
        return compile_cnot(system, *pairs[0], mode=mode, magnitude=magnitude)

    flip_mode = _flip_mode(mode)
    times = {pair: 1 / (4 * system.coupling(*pair)) for pair in pairs}
    breakpoints = sorted(set(times.values()))
    half_blocks = []
    segments = []
    previous = 0.0
    for point in breakpoints:
        active = [pair for pair in pairs if times[pair] >= point]
        segments.append(point - previous)
        half_blocks.append(_retain_for(system, active, point - previous, flip_mode, magnitude))
        previous = point
    half = half_blocks[0].then(*half_blocks[1:])

    controls = tuple(c for c, _ in pairs)
    targets = tuple(t for _, t in pairs)
    echo = pi_flip(system, targets, Z_AXIS, flip_mode, magnitude, label='E' + ''.join(map(str, targets)))
    uzz_target = _zz_target(system, pairs, [math.pi] * len(pairs))
    uzz = Sequence((*echo.reversed().events, *half.events, *echo.events, *half.events), uzz_target)

    target = np.eye(system.dim, dtype=complex)
    for c, t in pairs:
        target = cnot_matrix(system.n, c, t) @ target
    metadata = {
        'construction': 'simultaneous_cnot',
        'mode': str(mode),
        'gate': 'simul-cnot:' + ','.join(f'{c}:{t}' for c, t in pairs),
        'pairs': [[c, t] for c, t in pairs],
        'global_phase': f'-{len(pairs)}pi/4',
        'segment_times': segments,
    }
    before, after = _cnot_plan(controls, targets, True)
    return _assemble_cnot(system, before, uzz, after, mode, magnitude, target, metadata)


def resource_scaling(n_values):
    """Delays, pi flips and free-evolution time of one U_zz half per spin count."""
    rows = []
    for n in n_values:
        levels = max(n - 2, 0)
        delays = 4 ** levels
        # cada nível repete o bloco interno 4 vezes e acrescenta 4 pulsos pi
        flips = sum(4 ** level for level in range(1, levels + 1))
        rows.append({
            'n_spins': n,
            'levels': levels,
            'delays_per_half': delays,
            'pi_flips_per_half': flips,
            'evolution_time_per_tau0': delays,
        })
    return pd.DataFrame(rows)
