from django import forms
from django.core.validators import RegexValidator

from .sequences import EventKind
from .spins import GAMMA, SPECIES_ALIASES

SPECIES_CHOICES = [(name, name) for name in sorted(GAMMA)] + [
    (alias, f'{alias} ({species})') for alias, species in sorted(SPECIES_ALIASES.items())
]

UNIT_CHOICES = [
    ('T', 'tesla'),
    ('G', 'gauss'),
]


class SpinEntryForm(forms.Form):
    name = forms.CharField(
        max_length=16,
        validators=[RegexValidator(regex=r'^[A-Za-z][A-Za-z0-9_+-]*$', message='Spin names start with a letter')],
    )
    species = forms.ChoiceField(choices=SPECIES_CHOICES, required=False)
    gamma = forms.FloatField(required=False)

    def clean_gamma(self):
        gamma = self.cleaned_data.get('gamma')
        if gamma is not None and gamma == 0.0:
            raise forms.ValidationError('gamma must be nonzero')
        return gamma

    def clean(self):
        cleaned = super().clean()
        species = cleaned.get('species')
        gamma = cleaned.get('gamma')
        if self.errors:
            return cleaned
        if bool(species) == (gamma is not None):
            raise forms.ValidationError('give exactly one of species or gamma')
        if species:
            cleaned['gamma'] = GAMMA[SPECIES_ALIASES.get(species, species)]
        return cleaned


class CouplingEntryForm(forms.Form):
    # i e j aceitam índice 1-based ou nome do spin; a resolução fica com o SpinSystem
    i = forms.CharField(max_length=16)
    j = forms.CharField(max_length=16)
    hz = forms.FloatField()


def _vector(value, label):
    if not isinstance(value, list) or len(value) != 3:
        raise forms.ValidationError(f'{label} must be a list of three numbers')
    if not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value):
        raise forms.ValidationError(f'{label} must contain only numbers')
    return [float(c) for c in value]


class EventEntryForm(forms.Form):
    kind = forms.ChoiceField(choices=EventKind.choices)
    duration = forms.FloatField(required=False, min_value=0.0)
    field = forms.JSONField(required=False)
    unit = forms.ChoiceField(choices=UNIT_CHOICES, required=False)
    spins = forms.JSONField(required=False)
    axis = forms.JSONField(required=False)
    angle = forms.FloatField(required=False)
    label = forms.CharField(required=False, max_length=64)

    def clean_field(self):
        value = self.cleaned_data.get('field')
        return None if value is None else _vector(value, 'field')

    def clean_axis(self):
        value = self.cleaned_data.get('axis')
        return None if value is None else _vector(value, 'axis')

    def clean_spins(self):
        value = self.cleaned_data.get('spins')
        if value is None:
            return None
        if not isinstance(value, list) or not value:
            raise forms.ValidationError('spins must be a non-empty list')
        return value

    def clean(self):
        cleaned = super().clean()
        if self.errors:
            return cleaned
        kind = cleaned['kind']
        if kind in (EventKind.DC_PULSE, EventKind.DELAY) and cleaned.get('duration') is None:
            raise forms.ValidationError(f'{kind} needs a duration')
        if kind == EventKind.DC_PULSE and cleaned.get('field') is None:
            raise forms.ValidationError('dc_pulse needs a field')
        if kind == EventKind.IDEAL_GATE:
            missing = [key for key in ('spins', 'axis', 'angle') if cleaned.get(key) is None]
            if missing:
                raise forms.ValidationError(f'ideal_gate needs {", ".join(missing)}')
        return cleaned
