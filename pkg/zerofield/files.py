"""
System and sequence files (JSON).

Every object read from a file remembers where its opening brace was, so
validation errors can point at a line and column.
"""

from __future__ import annotations

import json
import logging
from json import decoder, scanner
from pathlib import Path

from .exceptions import ConfigurationError, PhysicsError
from .forms import CouplingEntryForm, EventEntryForm, SpinEntryForm
from .gates import GateSpec
from .sequences import EventKind, PulseEvent, Sequence
from .spins import BUILTIN_SYSTEMS, FieldVector, SpinSystem

logger = logging.getLogger(__name__)

SEQUENCE_FORMAT = 'zerofield-sequence/1'
GAUSS = 1e-4

SYSTEM_KEYS = {'name', 'spins', 'couplings'}
SEQUENCE_KEYS = {'format', 'n_spins', 'target', 'metadata', 'events'}


class LocatedDict(dict):
    line = None
    column = None


class _LocatingDecoder(json.JSONDecoder):
    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.parse_object = self._parse_object
        # o scanner em C ignora parse_object; a versão Python respeita
        self.scan_once = scanner.py_make_scanner(self)

    @staticmethod
    def _parse_object(s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo=None):
        text, end = s_and_end
        pairs, new_end = decoder.JSONObject(s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo)
        located = LocatedDict(pairs)
        start = end - 1
        located.line = text.count('\n', 0, start) + 1
        located.column = start - text.rfind('\n', 0, start)
        return located, new_end


def parse_json(text):
    try:
        return json.loads(text, cls=_LocatingDecoder)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(exc.msg, exc.lineno, exc.colno) from None


def _position(obj):
    return getattr(obj, 'line', None), getattr(obj, 'column', None)


def _require_object(obj, what):
    if not isinstance(obj, dict):
        raise ConfigurationError(f'{what} must be an object')


def _reject_unknown(obj, allowed, where):
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigurationError(f'unknown key {unknown[0]!r} in {where}', *_position(obj))


def _validated(form_class, obj, where):
    _require_object(obj, where)
    _reject_unknown(obj, form_class.base_fields, where)
    form = form_class(data=obj)
    if not form.is_valid():
        field, errors = next(iter(form.errors.as_data().items()))
        prefix = where if field == '__all__' else f'{where}.{field}'
        raise ConfigurationError(f'{prefix}: {errors[0].messages[0]}', *_position(obj))
    return form.cleaned_data


def _read(path):
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigurationError(f'cannot read {path}: {exc.strerror}') from None


# =============================================================================
# SISTEMAS
# =============================================================================

def _spin_number(ref, names):
    if ref.isdigit():
        return int(ref)
    return names.index(ref) + 1 if ref in names else ref


def parse_system(text, label=''):
    document = parse_json(text)
    _require_object(document, 'system file')
    _reject_unknown(document, SYSTEM_KEYS, 'system file')
    spins = document.get('spins')
    if not isinstance(spins, list) or not spins:
        raise ConfigurationError('system file needs a non-empty "spins" list', *_position(document))

    entries = [_validated(SpinEntryForm, spin, f'spins[{k}]') for k, spin in enumerate(spins)]
    names = [entry['name'] for entry in entries]
    couplings = {}
    seen = set()
    raw_couplings = document.get('couplings', [])
    if not isinstance(raw_couplings, list):
        raise ConfigurationError('"couplings" must be a list', *_position(document))
    for k, entry in enumerate(raw_couplings):
        cleaned = _validated(CouplingEntryForm, entry, f'couplings[{k}]')
        refs = tuple(_spin_number(v, names) for v in (cleaned['i'], cleaned['j']))
        if frozenset(refs) in seen:
            raise ConfigurationError(f'couplings[{k}]: pair listed twice', *_position(entry))
        seen.add(frozenset(refs))
        couplings[refs] = cleaned['hz']

    try:
        return SpinSystem.build(
            [(entry['name'], entry['gamma']) for entry in entries],
            couplings,
            label=document.get('name') or label,
        )
    except PhysicsError as exc:
        raise ConfigurationError(str(exc), *_position(document)) from None


def dump_system(system):
    document = {
        'name': system.label,
        'spins': [{'name': name, 'gamma': gamma} for name, gamma in zip(system.names, system.gammas)],
        'couplings': [
            {'i': i + 1, 'j': j + 1, 'hz': system.couplings[i][j]}
            for i in range(system.n) for j in range(i + 1, system.n)
            if system.couplings[i][j] != 0.0
        ],
    }
    return json.dumps(document, indent=2) + '\n'


def load_system(ref):
    """A built-in system by name (CH, CHF, PH) or a system file path."""
    if ref in BUILTIN_SYSTEMS:
        return BUILTIN_SYSTEMS[ref]
    return parse_system(_read(ref), label=Path(ref).stem)


# =============================================================================
# SEQUÊNCIAS
# =============================================================================

def _event_from(cleaned, system, where, obj):
    kind = cleaned['kind']
    label = cleaned.get('label') or ''
    try:
        if kind == EventKind.DELAY:
            return PulseEvent.delay(cleaned['duration'], label)
        if kind == EventKind.DC_PULSE:
            scale = GAUSS if cleaned.get('unit') == 'G' else 1.0
            return PulseEvent.dc_pulse(
                FieldVector(*(c * scale for c in cleaned['field'])), cleaned['duration'], label,
            )
        spins = tuple(system.index(spin) for spin in cleaned['spins'])
        return PulseEvent(
            EventKind.IDEAL_GATE, spins=tuple(sorted(spins)),
            axis=tuple(cleaned['axis']), angle=cleaned['angle'], label=label,
        )
    except PhysicsError as exc:
        raise ConfigurationError(f'{where}: {exc}', *_position(obj)) from None


def parse_sequence(text, system):
    document = parse_json(text)
    _require_object(document, 'sequence file')
    _reject_unknown(document, SEQUENCE_KEYS, 'sequence file')
    if document.get('format', SEQUENCE_FORMAT) != SEQUENCE_FORMAT:
        raise ConfigurationError(f'unsupported format {document["format"]!r}', *_position(document))
    n_spins = document.get('n_spins', system.n)
    if n_spins != system.n:
        raise PhysicsError(f'sequence is for {n_spins} spins but the system has {system.n}')
    events = document.get('events')
    if not isinstance(events, list):
        raise ConfigurationError('sequence file needs an "events" list', *_position(document))
    metadata = document.get('metadata', {})
    _require_object(metadata, 'metadata')

    parsed = [
        _event_from(_validated(EventEntryForm, event, f'events[{k}]'), system, f'events[{k}]', event)
        for k, event in enumerate(events)
    ]
    gate = document.get('target')
    target = GateSpec.parse(gate).target(system) if gate else _identity(system)
    return Sequence(tuple(parsed), target, dict(metadata))


def _identity(system):
    return GateSpec('identity').target(system)


def _event_record(event):
    record = {'kind': str(event.kind)}
    if event.kind == EventKind.DC_PULSE:
        record.update({'field': list(event.field.components), 'unit': 'T', 'duration': event.duration})
    elif event.kind == EventKind.DELAY:
        record['duration'] = event.duration
    else:
        record.update({'spins': list(event.spins), 'axis': list(event.axis), 'angle': event.angle})
    if event.label:
        record['label'] = event.label
    return record


def dump_sequence(sequence, gate=None):
    """JSON text of a sequence; `gate` (a gate spec string) names its target."""
    gate = gate or sequence.metadata.get('gate')
    document = {'format': SEQUENCE_FORMAT, 'n_spins': sequence.n_spins}
    if gate:
        document['target'] = gate
    document['metadata'] = dict(sequence.metadata)
    document['events'] = [_event_record(event) for event in sequence.events]
    return json.dumps(document, indent=2) + '\n'


def load_sequence(path, system):
    return parse_sequence(_read(path), system)
