from pathlib import Path

from zerofield.compiler import CompileMode, resource_scaling
from zerofield.files import dump_sequence
from zerofield.gates import GateSpec

from ._base import ZeroFieldCommand, logger


class Command(ZeroFieldCommand):
    help = 'Compile a gate into a pulse sequence file.'

    def add_arguments(self, parser):
        self.add_system_argument(parser)
        parser.add_argument('gate', help='identity | single:SPIN:AXIS:ANGLE | cnot:C:T | simul-cnot:C1:T1,C2:T2')
        parser.add_argument('--mode', choices=CompileMode.values, default=CompileMode.IDEAL.value)
        self.add_field_argument(parser)
        parser.add_argument('--out', default=None, help='sequence file to write')
        parser.add_argument('--scaling', type=int, default=None, metavar='N',
                            help='also print the decoupling cost table for 2..N spins')

    def handle(self, *args, **options):
        system = self.load_system(options)
        spec = GateSpec.parse(options['gate'])
        sequence = spec.compile(system, options['mode'], self.magnitude(options))
        resources = sequence.resources()

        self.stdout.write(f'gate: {spec.text} ({options["mode"]})')
        self.stdout.write(f'segments: {len(sequence)}')
        self.stdout.write(
            f'dc pulses: {resources["dc_pulses"]}; delays: {resources["delays"]}; '
            f'ideal gates: {resources["ideal_gates"]}'
        )
        self.stdout.write(f'total duration: {resources["total_duration"]:.6e} s')
        if 'tau0' in sequence.metadata:
            self.stdout.write(f'tau0: {sequence.metadata["tau0"]:.6e} s')
        if sequence.events:
            self.stdout.write(f'first segment: {sequence.events[0].duration:.6e} s')

        if options['out']:
            Path(options['out']).write_text(dump_sequence(sequence, spec.text), encoding='utf-8')
            logger.info('💾 sequência gravada em %s', options['out'])
        if options['scaling']:
            table = resource_scaling(range(2, options['scaling'] + 1))
            self.stdout.write(table.to_string(index=False))
