import logging
import sys
from functools import partial

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from zerofield.exceptions import ConfigurationError, PhysicsError
from zerofield.files import load_system
from zerofield.spins import parse_magnitude

logger = logging.getLogger('zerofield.commands')

EXIT_USAGE = 1
EXIT_PHYSICS = 2


def _usage_error(parser, message):
    # argparse sairia com 2, que aqui é reservado a erros físicos
    if parser.called_from_command_line:
        parser.print_usage(sys.stderr)
        parser.exit(EXIT_USAGE, f'{parser.prog}: error: {message}\n')
    raise CommandError(f'Error: {message}', returncode=EXIT_USAGE)


class ZeroFieldCommand(BaseCommand):
    """Shared plumbing: exit codes, system loading and unit parsing."""

    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(_usage_error, parser)
        return parser

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except ConfigurationError as exc:
            logger.error('❌ %s', exc)
            raise CommandError(str(exc), returncode=EXIT_USAGE) from exc
        except PhysicsError as exc:
            logger.error('❌ %s', exc)
            raise CommandError(str(exc), returncode=EXIT_PHYSICS) from exc

    def add_system_argument(self, parser):
        parser.add_argument('system', help='built-in system (CH, CHF, PH) or path to a system file')

    def add_field_argument(self, parser):
        parser.add_argument(
            '--field', default=settings.ZF_DEFAULT_FIELD,
            help='field magnitude, e.g. 9G or 9e-4T (default: %(default)s)',
        )

    def load_system(self, options):
        system = load_system(options['system'])
        logger.info('🧲 sistema %s com %d spins', system.label or options['system'], system.n)
        return system

    def magnitude(self, options):
        return parse_magnitude(options['field'])

    def spin_set(self, system, text):
        refs = [part.strip() for part in text.split(',') if part.strip()]
        if not refs:
            raise ConfigurationError('empty spin list')
        try:
            return system.indices(int(ref) if ref.isdigit() else ref for ref in refs)
        except PhysicsError as exc:
            # referência de spin errada é erro de uso, não de física
            raise ConfigurationError(str(exc)) from None

    def time_range(self, text):
        lo, sep, hi = text.partition(':')
        try:
            bounds = (float(lo), float(hi))
        except ValueError:
            raise ConfigurationError(f'cannot read range {text!r}; use LO:HI in seconds') from None
        if not sep:
            raise ConfigurationError(f'cannot read range {text!r}; use LO:HI in seconds')
        return bounds

    def write_csv(self, frame, path):
        """CSV with LF line endings; '-' writes to stdout."""
        text = frame.to_csv(index=False, lineterminator='\n', float_format='%.12g')
        if path == '-':
            self.stdout.write(text, ending='')
            return
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
        logger.info('💾 CSV gravado em %s (%d linhas)', path, len(frame))
