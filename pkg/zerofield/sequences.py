"""
Pulse events and sequences.

Events are listed in the order they are applied in time, so the realized
unitary of [e1, e2, e3] is U3 U2 U1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType

import numpy as np
from django.db import models

from .exceptions import PhysicsError
from .spins import FieldVector

AXIS_TOLERANCE = 1e-12


class EventKind(models.TextChoices):
    DC_PULSE = 'dc_pulse', 'DC pulse'
    DELAY = 'delay', 'Free evolution'
    IDEAL_GATE = 'ideal_gate', 'Ideal rotation'


def unit_axis(axis):
    """Normalize a 3-vector; a zero vector is rejected."""
    vector = np.asarray(axis, dtype=float)
    if vector.shape != (3,) or not np.all(np.isfinite(vector)):
        raise PhysicsError(f'axis must be three finite numbers, got {axis}')
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise PhysicsError('axis has zero norm')
    return tuple(float(c) for c in vector / norm)


def perpendicular_axis(axis):
    """Deterministic unit vector orthogonal to `axis`.

    z when the axis lies in the xy plane, otherwise the normalized
    (-n_y, n_x, 0); x when the axis is along z.
    """
    nx, ny, nz = unit_axis(axis)
    if abs(nz) < AXIS_TOLERANCE:
        return (0.0, 0.0, 1.0)
    norm = math.hypot(nx, ny)
    if norm < AXIS_TOLERANCE:
        return (1.0, 0.0, 0.0)
    return (-ny / norm, nx / norm, 0.0)


@dataclass(frozen=True)
class PulseEvent:
    kind: EventKind
    duration: float = 0.0
    field: FieldVector | None = None
    spins: tuple = ()
    axis: tuple = ()
    angle: float = 0.0
    label: str = ''

    def __post_init__(self):
        if self.kind not in EventKind.values:
            raise PhysicsError(f'unknown event kind {self.kind!r}')
        object.__setattr__(self, 'kind', EventKind(self.kind))
        if not math.isfinite(self.duration) or self.duration < 0:
            raise PhysicsError(f'duration must be finite and non-negative, got {self.duration}')
        if self.kind == EventKind.DC_PULSE and self.field is None:
            raise PhysicsError('a dc_pulse needs a field vector')
        if self.kind == EventKind.IDEAL_GATE:
            if not self.spins:
                raise PhysicsError('an ideal_gate needs at least one spin')
            if len(self.axis) != 3 or abs(math.sqrt(sum(c * c for c in self.axis)) - 1.0) > AXIS_TOLERANCE:
                raise PhysicsError(f'ideal_gate axis must be a unit vector, got {self.axis}')
            if not math.isfinite(self.angle):
                raise PhysicsError('ideal_gate angle must be finite')

    @classmethod
    def dc_pulse(cls, field_vector, duration, label=''):
        return cls(EventKind.DC_PULSE, duration=float(duration), field=field_vector, label=label)

    @classmethod
    def delay(cls, duration, label=''):
        return cls(EventKind.DELAY, duration=float(duration), label=label)

    @classmethod
    def ideal_gate(cls, spins, axis, angle, label=''):
        return cls(
            EventKind.IDEAL_GATE,
            spins=tuple(sorted(spins)),
            axis=unit_axis(axis),
            angle=float(angle),
            label=label,
        )

    def inverted(self):
        """Negated field or angle; a delay stays as it is."""
        if self.kind == EventKind.DC_PULSE:
            return replace(self, field=-self.field)
        if self.kind == EventKind.IDEAL_GATE:
            return replace(self, angle=-self.angle)
        return self


@dataclass(frozen=True, eq=False)
class Sequence:
    """Ordered events plus the unitary they are meant to realize."""

    events: tuple
    target: np.ndarray
    metadata: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def __post_init__(self):
        object.__setattr__(self, 'events', tuple(self.events))
        target = np.array(self.target, dtype=complex)
        target.flags.writeable = False
        object.__setattr__(self, 'target', target)
        object.__setattr__(self, 'metadata', MappingProxyType(dict(self.metadata)))

    @property
    def n_spins(self):
        return int(round(math.log2(self.target.shape[0])))

    @property
    def total_duration(self):
        return math.fsum(event.duration for event in self.events)

    @property
    def delays(self):
        return [event for event in self.events if event.kind == EventKind.DELAY]

    def __len__(self):
        return len(self.events)

    def then(self, *others, target=None, metadata=None):
        """This sequence followed in time by `others`."""
        events = list(self.events)
        product = self.target
        for other in others:
            events.extend(other.events)
            product = other.target @ product
        return Sequence(
            tuple(events),
            product if target is None else target,
            self.metadata if metadata is None else metadata,
        )

    def reversed(self):
        """Reverse the order and invert every pulse and rotation."""
        metadata = dict(self.metadata)
        metadata['reversed'] = not metadata.get('reversed', False)
        return Sequence(
            tuple(event.inverted() for event in reversed(self.events)),
            self.target.conj().T,
            metadata,
        )

    def resources(self):
        counts = {kind.value: 0 for kind in EventKind}
        pulse_time = 0.0
        delay_time = 0.0
        for event in self.events:
            counts[event.kind.value] += 1
            if event.kind == EventKind.DC_PULSE:
                pulse_time += event.duration
            elif event.kind == EventKind.DELAY:
                delay_time += event.duration
        return {
            'dc_pulses': counts[EventKind.DC_PULSE.value],
            'delays': counts[EventKind.DELAY.value],
            'ideal_gates': counts[EventKind.IDEAL_GATE.value],
            'pulse_time': pulse_time,
            'delay_time': delay_time,
            'total_duration': self.total_duration,
        }


def empty_sequence(n, metadata=None):
    return Sequence((), np.eye(2 ** n, dtype=complex), metadata or {})
