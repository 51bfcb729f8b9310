from django.conf import settings

from zerofield.pulses import find_pi_duration, sweep_fidelity

from ._base import ZeroFieldCommand, logger


class Command(ZeroFieldCommand):
    help = 'Find a DC pulse duration that flips the target spins by pi and leaves the rest alone.'

    def add_arguments(self, parser):
        self.add_system_argument(parser)
        parser.add_argument('--target', required=True, help='comma-separated spin names or 1-based indices')
        self.add_field_argument(parser)
        parser.add_argument('--range', dest='t_range', default=f'0:{settings.ZF_PI_SEARCH_MAX}',
                            help='duration window LO:HI in seconds (default: %(default)s)')
        parser.add_argument('--grid', type=int, default=None, help='grid points (default: 40 per period)')
        parser.add_argument('--out', default=None, help='write the scanned curve as CSV')

    def handle(self, *args, **options):
        system = self.load_system(options)
        targets = self.spin_set(system, options['target'])
        magnitude = self.magnitude(options)
        t_range = self.time_range(options['t_range'])

        solution = find_pi_duration(system, targets, magnitude, t_range, options['grid'])
        names = ','.join(system.names[k - 1] for k in targets)
        self.stdout.write(f'target: {names}')
        self.stdout.write(f'field: {magnitude:.6e} T')
        self.stdout.write(f'duration: {solution.duration:.6e} s')
        self.stdout.write(f'fidelity: {solution.predicted_fidelity:.6f}')
        logger.info('✅ pulso pi em %s: %.6e s', names, solution.duration)

        if options['out']:
            points = options['grid'] or 1001
            self.write_csv(sweep_fidelity(system, targets, magnitude, t_range, points), options['out'])
