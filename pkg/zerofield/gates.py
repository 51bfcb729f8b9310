"""
Gate spec strings used on the command line and inside sequence files.

    identity
    single:SPIN:AXIS:ANGLE      e.g. single:C:z:pi/2, single:1:1;1;0:-pi/4
    cnot:CONTROL:TARGET         e.g. cnot:1:2, cnot:C:H
    simul-cnot:C1:T1,C2:T2      e.g. simul-cnot:1:2,3:4
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .compiler import CompileMode, compile_cnot, compile_simultaneous_cnot, compile_single_qubit
from .exceptions import ConfigurationError
from .linalg import cnot_matrix, rotation
from .sequences import empty_sequence, unit_axis
from .spins import default_magnitude

NAMED_AXES = {
    'x': (1.0, 0.0, 0.0), 'y': (0.0, 1.0, 0.0), 'z': (0.0, 0.0, 1.0),
    '-x': (-1.0, 0.0, 0.0), '-y': (0.0, -1.0, 0.0), '-z': (0.0, 0.0, -1.0),
}

_PI_ANGLE = re.compile(r'^(?P<sign>[-+]?)(?:(?P<k>\d+(?:\.\d*)?)\*)?pi(?:/(?P<m>\d+(?:\.\d*)?))?$')


def parse_angle(text):
    """Radians from '1.5708', 'pi', '-pi/2' or '3*pi/4'."""
    text = text.strip().replace(' ', '')
    match = _PI_ANGLE.match(text)
    if match:
        value = math.pi * float(match.group('k') or 1) / float(match.group('m') or 1)
        return -value if match.group('sign') == '-' else value
    try:
        value = float(text)
    except ValueError:
        raise ConfigurationError(f'cannot read angle {text!r}') from None
    if not math.isfinite(value):
        raise ConfigurationError(f'angle must be finite, got {text!r}')
    return value


def parse_axis(text):
    text = text.strip().lower()
    if text in NAMED_AXES:
        return NAMED_AXES[text]
    parts = re.split(r'[;,]', text)
    try:
        return unit_axis([float(part) for part in parts])
    except ValueError:
        raise ConfigurationError(f'cannot read axis {text!r}; use x, y, z or a;b;c') from None


def _spin_ref(text):
    text = text.strip()
    return int(text) if text.isdigit() else text


@dataclass(frozen=True)
class GateSpec:
    kind: str
    spins: tuple = ()
    axis: tuple = ()
    angle: float = 0.0
    text: str = ''

    @classmethod
    def parse(cls, text):
        text = text.strip()
        head, _, rest = text.partition(':')
        head = head.lower()
        if head == 'identity' and not rest:
            return cls('identity', text='identity')
        if head == 'single':
            parts = rest.split(':')
            if len(parts) != 3:
                raise ConfigurationError(f'single gate needs SPIN:AXIS:ANGLE, got {text!r}')
            return cls('single', (_spin_ref(parts[0]),), parse_axis(parts[1]), parse_angle(parts[2]), text)
        if head == 'cnot':
            parts = rest.split(':')
            if len(parts) != 2:
                raise ConfigurationError(f'cnot needs CONTROL:TARGET, got {text!r}')
            return cls('cnot', ((_spin_ref(parts[0]), _spin_ref(parts[1])),), text=text)
        if head == 'simul-cnot':
            pairs = []
            for chunk in rest.split(','):
                parts = chunk.split(':')
                if len(parts) != 2:
                    raise ConfigurationError(f'simul-cnot pairs are CONTROL:TARGET, got {chunk!r}')
                pairs.append((_spin_ref(parts[0]), _spin_ref(parts[1])))
            return cls('simul-cnot', tuple(pairs), text=text)
        raise ConfigurationError(f'unknown gate {text!r}; expected identity, single, cnot or simul-cnot')

    def target(self, system):
        if self.kind == 'identity':
            return np.eye(system.dim, dtype=complex)
        if self.kind == 'single':
            return rotation(system.n, (system.index(self.spins[0]),), self.axis, self.angle)
        unitary = np.eye(system.dim, dtype=complex)
        for control, target in self.spins:
            unitary = cnot_matrix(system.n, system.index(control), system.index(target)) @ unitary
        return unitary

    def compile(self, system, mode=CompileMode.IDEAL, magnitude=None):
        magnitude = magnitude or default_magnitude()
        if self.kind == 'identity':
            sequence = empty_sequence(system.n, {'construction': 'identity'})
        elif self.kind == 'single':
            sequence = compile_single_qubit(
                system, self.spins[0], self.axis, self.angle, magnitude, mode=mode,
            )
        elif self.kind == 'cnot':
            sequence = compile_cnot(system, *self.spins[0], mode=mode, magnitude=magnitude)
        else:
            sequence = compile_simultaneous_cnot(system, self.spins, mode=mode, magnitude=magnitude)
        metadata = dict(sequence.metadata)
        metadata['gate'] = self.text
        metadata['field_tesla'] = magnitude
        return type(sequence)(sequence.events, sequence.target, metadata)
