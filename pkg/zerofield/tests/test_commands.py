import json
import tempfile
from io import StringIO
from pathlib import Path

import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

UNCOUPLED = '{"name": "pair", "spins": [{"name": "A", "gamma": 1e7}, {"name": "B", "gamma": 3e7}]}'


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name, content=None):
        path = Path(self.tmp.name) / name
        if content is not None:
            path.write_text(content, encoding='utf-8')
        return str(path)

    def run_command(self, *args):
        out = StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(*args)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception


class CheckCommandTests(CommandTestCase):
    def test_builtin_system(self):
        lines = self.run_command('zfcheck', 'CHF').splitlines()
        self.assertEqual(lines[0], 'controllable')
        self.assertIn('  J(1,2) = 160.7000 Hz', lines)
        self.assertTrue(lines[-1].startswith('components: {1,2,3}'))

    def test_disconnected_file(self):
        output = self.run_command('zfcheck', self.path('pair.json', UNCOUPLED))
        self.assertTrue(output.startswith('not_controllable'))
        self.assertIn('{1} | {2}', output)

    def test_bad_file(self):
        error = self.assertExitCode(1, 'zfcheck', self.path('bad.json', '{"spins": [{"name": "A"}'))
        self.assertIn('line 1', str(error))
        self.assertExitCode(1, 'zfcheck', self.path('missing.json'))


class DesignCommandTests(CommandTestCase):
    def test_carbon_pulse(self):
        lines = self.run_command('zfdesign', 'CH', '--target', 'C', '--range', '3e-5:6e-5').splitlines()
        self.assertEqual(lines[0], 'target: C')
        self.assertEqual(lines[1], 'field: 9.000000e-04 T')
        duration = float(lines[2].split()[1])
        fidelity = float(lines[3].split()[1])
        self.assertTrue(5.1e-5 < duration < 5.3e-5)
        self.assertGreaterEqual(fidelity, 0.999)

    def test_writes_the_scan(self):
        out = self.path('scan.csv')
        self.run_command('zfdesign', 'CHF', '--target', 'F', '--range', '0:1e-3', '--grid', '201', '--out', out)
        frame = pd.read_csv(out)
        self.assertEqual(list(frame.columns), ['t_seconds', 'fidelity'])
        self.assertEqual(len(frame), 201)
        self.assertTrue(frame['t_seconds'].is_monotonic_increasing)
        self.assertNotIn(b'\r', Path(out).read_bytes())

    def test_usage_errors(self):
        self.assertExitCode(1, 'zfdesign', 'CH', '--target', 'C', '--field', 'strong')
        self.assertExitCode(1, 'zfdesign', 'CH', '--target', 'C', '--range', '5')
        self.assertExitCode(2, 'zfdesign', 'CH', '--target', 'C', '--range', '3:1')
        self.assertExitCode(1, 'zfdesign', 'CH', '--target', 'N')


class SweepCommandTests(CommandTestCase):
    def test_csv_on_stdout(self):
        lines = self.run_command(
            'zfsweep', 'PH', '--target', 'P', '--range', '1e-4:2e-4', '--points', '11',
        ).splitlines()
        self.assertEqual(lines[0], 't_seconds,fidelity')
        self.assertEqual(len(lines), 12)
        times = [float(line.split(',')[0]) for line in lines[1:]]
        self.assertEqual(times, sorted(times))
        self.assertEqual(times[0], 1e-4)


class CompileAndSimulateTests(CommandTestCase):
    def test_identity(self):
        output = self.run_command('zfcompile', 'CHF', 'identity')
        self.assertIn('segments: 0', output)

    def test_cnot_round_trip(self):
        sequence = self.path('cnot.json')
        output = self.run_command('zfcompile', 'CH', 'cnot:C:H', '--out', sequence)
        self.assertIn('gate: cnot:C:H (ideal)', output)
        self.assertEqual(json.loads(Path(sequence).read_text())['target'], 'cnot:C:H')

        lines = self.run_command('zfsimulate', 'CH', sequence).splitlines()
        self.assertEqual(lines[0], 'fidelity: 1.000000')
        self.assertTrue(lines[2].startswith('config: J during pulses: off'))

    def test_chf_report_and_reference(self):
        sequence = self.path('cnot.json')
        output = self.run_command('zfcompile', 'CHF', 'cnot:1:2', '--out', sequence)
        self.assertIn('tau0: 3.889', output)
        self.assertIn('ideal gates:', output)

        record = json.loads(self.run_command('zfsimulate', 'CHF', sequence, '--reference', '0.9927', '--json'))
        self.assertAlmostEqual(record['fidelity'], 0.995451, places=5)
        self.assertAlmostEqual(record['reference_delta'], record['fidelity'] - 0.9927, places=9)

        text = self.run_command('zfsimulate', 'CHF', sequence, '--reference', '0.9927')
        self.assertIn('reference: 0.992700 (delta', text)

    def test_chf_compiled_cnot(self):
        sequence = self.path('compiled.json')
        self.run_command('zfcompile', 'CHF', 'cnot:C:H', '--mode', 'compiled', '--out', sequence)
        record = json.loads(self.run_command('zfsimulate', 'CHF', sequence, '--json'))
        self.assertAlmostEqual(record['fidelity'], 0.9927, delta=2e-3)

        full = self.path('full.json')
        self.run_command('zfcompile', 'CHF', 'cnot:C:H', '--mode', 'full', '--out', full)
        self.assertIn('fidelity:', self.run_command('zfsimulate', 'CHF', full, '--no-ideal-gates'))

    def test_compiled_mode_and_self_ideal(self):
        sequence = self.path('single.json')
        self.run_command('zfcompile', 'CHF', 'single:H:x:pi/2', '--mode', 'compiled', '--out', sequence)
        output = self.run_command('zfsimulate', 'CHF', sequence, '--ideal', 'self', '--no-ideal-gates')
        self.assertIn('fidelity: 1.000000', output)
        coupled = self.run_command('zfsimulate', 'CHF', sequence, '--j-during-pulses')
        self.assertIn('J during pulses: on', coupled)

    def test_scaling_table(self):
        output = self.run_command('zfcompile', 'CHF', 'identity', '--scaling', '5')
        self.assertIn('n_spins', output)
        self.assertIn('pi_flips_per_half', output)

    def test_exit_codes(self):
        pair = self.path('pair.json', UNCOUPLED)
        self.assertExitCode(2, 'zfcompile', pair, 'cnot:1:2')
        self.assertExitCode(1, 'zfcompile', 'CH', 'swap:1:2')
        self.assertExitCode(1, 'zfcompile', 'CH', 'cnot:1:2', '--mode=bogus')

        sequence = self.path('ideal.json')
        self.run_command('zfcompile', 'CH', 'cnot:1:2', '--out', sequence)
        self.assertExitCode(2, 'zfsimulate', 'CH', sequence, '--no-ideal-gates')
        self.assertExitCode(2, 'zfsimulate', 'CHF', sequence)
        self.assertExitCode(1, 'zfsimulate', 'CH', self.path('broken.json', '{"events": [{"kind": "delay"'))
        self.assertExitCode(1, 'zfsimulate', 'CH', sequence, '--ideal', self.path('bad.npy', 'not an array'))
