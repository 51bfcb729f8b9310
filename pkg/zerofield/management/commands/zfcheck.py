from zerofield.spins import check_controllability

from ._base import ZeroFieldCommand


class Command(ZeroFieldCommand):
    help = 'Report whether a spin system is controllable by DC pulses in zero field.'

    def add_arguments(self, parser):
        self.add_system_argument(parser)

    def handle(self, *args, **options):
        system = self.load_system(options)
        report = check_controllability(system)
        self.stdout.write(str(report.verdict))
        self.stdout.write(system.summary())
        self.stdout.write(report.witness())
