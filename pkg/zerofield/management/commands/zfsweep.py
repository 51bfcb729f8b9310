from zerofield.pulses import sweep_fidelity

from ._base import ZeroFieldCommand


class Command(ZeroFieldCommand):
    help = 'Tabulate the selective-pulse fidelity over a duration window (CSV: t_seconds,fidelity).'

    def add_arguments(self, parser):
        self.add_system_argument(parser)
        parser.add_argument('--target', required=True, help='comma-separated spin names or 1-based indices')
        self.add_field_argument(parser)
        parser.add_argument('--range', dest='t_range', required=True, help='duration window LO:HI in seconds')
        parser.add_argument('--points', type=int, default=1001)
        parser.add_argument('--out', default='-', help="CSV path, '-' for stdout (default)")

    def handle(self, *args, **options):
        system = self.load_system(options)
        targets = self.spin_set(system, options['target'])
        frame = sweep_fidelity(
            system, targets, self.magnitude(options), self.time_range(options['t_range']), options['points'],
        )
        self.write_csv(frame, options['out'])
