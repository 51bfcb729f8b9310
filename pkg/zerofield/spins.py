"""
Spin systems in zero field: species, J-couplings, the two Hamiltonians and the
graph criterion for controllability.

Units: gamma in rad/(s T), J in Hz, fields in tesla, Hamiltonians in rad/s.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from django.conf import settings
from django.db import models
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import ConfigurationError, PhysicsError
from .linalg import AXES, MAX_SPINS, spin_operator

logger = logging.getLogger(__name__)

# Razões giromagnéticas em rad s^-1 T^-1
GAMMA = {
    '1H': 267.513e6,
    '13C': 67.262e6,
    '19F': 251.662e6,
    '31P': 108.291e6,
}
SPECIES_ALIASES = {'H': '1H', 'C': '13C', 'F': '19F', 'P': '31P'}


def species_gamma(species):
    key = SPECIES_ALIASES.get(species, species)
    try:
        return GAMMA[key]
    except KeyError:
        raise PhysicsError(f'unknown species {species!r}; known: {", ".join(sorted(GAMMA))}') from None


@dataclass(frozen=True)
class FieldVector:
    bx: float = 0.0
    by: float = 0.0
    bz: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(c) for c in self.components):
            raise PhysicsError(f'field components must be finite, got {self.components}')

    @classmethod
    def along(cls, axis, magnitude):
        bx, by, bz = (float(c) * magnitude for c in axis)
        return cls(bx, by, bz)

    @property
    def components(self):
        return (self.bx, self.by, self.bz)

    @property
    def magnitude(self):
        return math.sqrt(self.bx ** 2 + self.by ** 2 + self.bz ** 2)

    def __neg__(self):
        return FieldVector(-self.bx, -self.by, -self.bz)

    def __add__(self, other):
        return FieldVector(self.bx + other.bx, self.by + other.by, self.bz + other.bz)


@dataclass(frozen=True)
class SpinSystem:
    """Immutable description of n coupled spin-1/2 nuclei.

    `couplings` is the full symmetric J matrix in Hz stored as nested tuples so
    the system stays hashable (design results are memoized per system).
    """

    names: tuple
    gammas: tuple
    couplings: tuple
    label: str = field(default='', compare=False)

    def __post_init__(self):
        n = len(self.names)
        if not 1 <= n <= MAX_SPINS:
            raise PhysicsError(f'spin count must be between 1 and {MAX_SPINS}, got {n}')
        if len(set(self.names)) != n:
            raise PhysicsError(f'spin names must be unique: {self.names}')
        if len(self.gammas) != n:
            raise PhysicsError('one gyromagnetic ratio per spin is required')
        for name, gamma in zip(self.names, self.gammas):
            if not math.isfinite(gamma) or gamma == 0.0:
                raise PhysicsError(f'gyromagnetic ratio of {name} must be finite and nonzero')
        if len(self.couplings) != n or any(len(row) != n for row in self.couplings):
            raise PhysicsError(f'coupling matrix must be {n}x{n}')
        for i in range(n):
            if self.couplings[i][i] != 0.0:
                raise PhysicsError(f'self-coupling of spin {i + 1} must be zero')
            for j in range(i + 1, n):
                if self.couplings[i][j] != self.couplings[j][i]:
                    raise PhysicsError(f'coupling matrix is not symmetric at ({i + 1}, {j + 1})')
                if not math.isfinite(self.couplings[i][j]):
                    raise PhysicsError(f'coupling ({i + 1}, {j + 1}) must be finite')

    @classmethod
    def build(cls, spins, couplings=None, label=''):
        """Build from [(name, gamma_or_species), ...] and {(i, j): hz} with 1-based or named refs."""
        names = tuple(name for name, _ in spins)
        gammas = tuple(
            species_gamma(value) if isinstance(value, str) else float(value)
            for _, value in spins
        )
        n = len(names)
        matrix = [[0.0] * n for _ in range(n)]
        partial = cls(names, gammas, tuple(tuple(row) for row in matrix), label)
        for (a, b), hz in (couplings or {}).items():
            i, j = partial.position(a), partial.position(b)
            if i == j:
                raise PhysicsError(f'a spin cannot couple to itself ({a})')
            matrix[i][j] = matrix[j][i] = float(hz)
        return cls(names, gammas, tuple(tuple(row) for row in matrix), label)

    @property
    def n(self):
        return len(self.names)

    @property
    def dim(self):
        return 2 ** self.n

    @property
    def gamma(self):
        return np.array(self.gammas, dtype=float)

    @property
    def J(self):
        return np.array(self.couplings, dtype=float)

    def position(self, ref):
        """0-based position of a spin given by 1-based index or by name."""
        if isinstance(ref, str) and ref in self.names:
            return self.names.index(ref)
        try:
            index = int(ref)
        except (TypeError, ValueError):
            raise PhysicsError(f'unknown spin {ref!r}; spins are {", ".join(self.names)}') from None
        if not 1 <= index <= self.n:
            raise PhysicsError(f'spin index {index} out of range 1..{self.n}')
        return index - 1

    def index(self, ref):
        """1-based index of a spin reference."""
        return self.position(ref) + 1

    def indices(self, refs):
        return tuple(sorted({self.index(ref) for ref in refs}))

    def coupling(self, a, b):
        return self.couplings[self.position(a)][self.position(b)]

    def others(self, spins):
        chosen = set(spins)
        return tuple(k for k in range(1, self.n + 1) if k not in chosen)

    def summary(self):
        lines = [f'system {self.label or "custom"}: {self.n} spins']
        for k, (name, gamma) in enumerate(zip(self.names, self.gammas), start=1):
            lines.append(f'  spin {k} {name}: gamma = {gamma:.6e} rad/(s T)')
        for i, j in combinations(range(self.n), 2):
            if self.couplings[i][j] != 0.0:
                lines.append(f'  J({i + 1},{j + 1}) = {self.couplings[i][j]:.4f} Hz')
        return '\n'.join(lines)


def pair_hamiltonian(system, i, j):
    """2 pi J_ij I_i.I_j for one pair."""
    a, b = system.index(i), system.index(j)
    hz = system.coupling(a, b)
    dot = sum(spin_operator(a, ax, system.n) @ spin_operator(b, ax, system.n) for ax in AXES)
    return 2 * math.pi * hz * dot


def build_zero_field_hamiltonian(system):
    """H0 = sum_{i<j} 2 pi J_ij I_i.I_j."""
    hamiltonian = np.zeros((system.dim, system.dim), dtype=complex)
    for i, j in combinations(range(1, system.n + 1), 2):
        if system.coupling(i, j) != 0.0:
            hamiltonian = hamiltonian + pair_hamiltonian(system, i, j)
    return hamiltonian


def build_dc_hamiltonian(system, field_vector):
    """H_DC = -sum_i gamma_i B.I_i (sign kept as written)."""
    hamiltonian = np.zeros((system.dim, system.dim), dtype=complex)
    for k, gamma in enumerate(system.gammas, start=1):
        for component, ax in zip(field_vector.components, AXES):
            if component != 0.0:
                hamiltonian = hamiltonian - gamma * component * spin_operator(k, ax, system.n)
    return hamiltonian


def regime_ratio(system, magnitude):
    """min |gamma| B over max |2 pi J|; the pulse model wants this >> 1."""
    j_max = np.abs(system.J).max() if system.n > 1 else 0.0
    if j_max == 0.0:
        return math.inf
    return float(np.abs(system.gamma).min() * magnitude / (2 * math.pi * j_max))


class Controllability(models.TextChoices):
    CONTROLLABLE = 'controllable', 'Controllable'
    NOT_CONTROLLABLE = 'not_controllable', 'Not controllable'
    UNKNOWN = 'unknown', 'Unknown'


@dataclass(frozen=True)
class ControllabilityReport:
    verdict: Controllability
    components: tuple
    distinct_gammas: bool

    @property
    def connected(self):
        return len(self.components) == 1

    def witness(self):
        groups = ' | '.join('{' + ','.join(str(k) for k in group) + '}' for group in self.components)
        gammas = 'distinct' if self.distinct_gammas else 'repeated'
        return f'components: {groups}; gyromagnetic ratios {gammas}'


def check_controllability(system):
    graph = csr_matrix((system.J != 0.0).astype(int))
    count, labels = connected_components(graph, directed=False)
    components = tuple(
        tuple(int(k) + 1 for k in np.flatnonzero(labels == label))
        for label in sorted(set(labels), key=lambda lab: int(np.flatnonzero(labels == lab)[0]))
    )
    distinct = len(set(system.gammas)) == system.n
    if count > 1:
        verdict = Controllability.NOT_CONTROLLABLE
    elif distinct:
        verdict = Controllability.CONTROLLABLE
    else:
        # o critério de conectividade só cobre razões giromagnéticas distintas
        verdict = Controllability.UNKNOWN
    logger.debug('controllability of %s: %s (%d components)', system.label, verdict, count)
    return ControllabilityReport(verdict, components, distinct)


BUILTIN_SYSTEMS = {
    'CH': SpinSystem.build([('C', '13C'), ('H', '1H')], {(1, 2): 222.0}, label='CH'),
    'PH': SpinSystem.build([('P', '31P'), ('H', '1H')], {(1, 2): 11.0}, label='PH'),
    'CHF': SpinSystem.build(
        [('C', '13C'), ('H', '1H'), ('F', '19F')],
        {(1, 2): 160.7, (1, 3): -194.4, (2, 3): 47.6},
        label='CHF',
    ),
}


_FIELD_PATTERN = re.compile(r'^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(G|T|mT|uT)?\s*$')
_FIELD_UNITS = {'T': 1.0, 'mT': 1e-3, 'uT': 1e-6, 'G': 1e-4}


def parse_magnitude(text):
    """Field magnitude in tesla from '9G', '9e-4T', '0.9 mT' or a bare number of tesla."""
    match = _FIELD_PATTERN.match(str(text))
    if not match:
        raise ConfigurationError(f'cannot read field {text!r}; use forms like 9G or 9e-4T')
    value = float(match.group(1)) * _FIELD_UNITS[match.group(2) or 'T']
    if not math.isfinite(value) or value <= 0:
        raise PhysicsError(f'field magnitude must be positive, got {text!r}')
    return value


def default_magnitude():
    return parse_magnitude(settings.ZF_DEFAULT_FIELD)
