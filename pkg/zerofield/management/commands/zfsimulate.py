import json
from pathlib import Path

import numpy as np

from zerofield.exceptions import ConfigurationError
from zerofield.files import load_sequence
from zerofield.gates import GateSpec
from zerofield.simulator import PhysicsConfig, evaluate_gate, simulate

from ._base import ZeroFieldCommand, logger


class Command(ZeroFieldCommand):
    help = 'Simulate a sequence file exactly and report its gate fidelity.'

    def add_arguments(self, parser):
        self.add_system_argument(parser)
        parser.add_argument('sequence', help='sequence file written by zfcompile')
        parser.add_argument('--ideal', default=None,
                            help="gate spec, 'self', or a .npy matrix (default: the file's own target)")
        parser.add_argument('--j-during-pulses', action='store_true', help='keep H0 on while DC pulses run')
        parser.add_argument('--no-ideal-gates', action='store_true', help='reject ideal_gate events')
        parser.add_argument('--reference', type=float, default=None, help='quoted fidelity to compare with')
        parser.add_argument('--json', action='store_true', help='print a JSON record instead of text')

    def ideal(self, system, sequence, text, config):
        if text is None:
            return None
        if text == 'self':
            return simulate(system, sequence, config)
        if text.endswith('.npy'):
            try:
                return np.load(text)
            except (OSError, ValueError) as exc:
                # ValueError: arquivo corrompido ou salvo com pickle
                raise ConfigurationError(f'cannot read {text}: {exc}') from None
        return GateSpec.parse(text).target(system)

    def handle(self, *args, **options):
        system = self.load_system(options)
        sequence = load_sequence(Path(options['sequence']), system)
        config = PhysicsConfig(
            include_j_during_pulses=options['j_during_pulses'],
            honor_ideal_gates=not options['no_ideal_gates'],
        )
        ideal = self.ideal(system, sequence, options['ideal'], config)
        report = evaluate_gate(system, sequence, ideal, config, reference=options['reference'])
        logger.info('✅ fidelidade %.6f em %d segmentos', report.fidelity, len(sequence))

        if options['json']:
            self.stdout.write(json.dumps(report.as_record(), sort_keys=True))
            return
        self.stdout.write(f'fidelity: {report.fidelity:.6f}')
        self.stdout.write(f'total duration: {report.total_duration:.6e} s')
        self.stdout.write(f'config: {config.describe()}')
        if report.reference is not None:
            self.stdout.write(f'reference: {report.reference:.6f} (delta {report.reference_delta:+.6f})')
