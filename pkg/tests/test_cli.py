import unittest
from unittest.mock import patch
from pathlib import Path
import sys
import os
import io
import json
import math
import tempfile

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import eikolab
from config import ExperimentConfig
from lab.entropy import JumpConfig
from lab.fields import make_jump_field
from plugin_manager import PluginManager
from plugins.acceptance import AcceptanceSuite, decreases_by, refinement_ratios
from plugins.interaction_scans import InteractionScans
from plugins.kinetic_tools import KineticChecks
from plugins.measures import MeasureProbes


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name) / 'out'
        PluginManager._instance = None
        self.patches = [
            patch.object(Path, 'home', return_value=Path(self.tmp.name)),
            patch('config.load_dotenv_file'),
            patch('sys.stderr', new_callable=io.StringIO),
        ]
        for p in self.patches:
            p.start()

    def tearDown(self):
        for p in reversed(self.patches):
            p.stop()
        PluginManager._instance = None
        self.tmp.cleanup()

    def run_cli(self, *argv):
        with patch('sys.stdout', new_callable=io.StringIO) as stdout:
            code = eikolab.run(list(argv))
        return code, stdout.getvalue()


class TestExitCodes(CliTestCase):
    def test_no_command(self):
        code, _ = self.run_cli()
        self.assertEqual(code, 1)

    def test_unknown_command(self):
        with self.assertRaises(SystemExit) as ctx:
            self.run_cli('bogus')
        self.assertEqual(ctx.exception.code, 1)

    def test_bad_option_value(self):
        with self.assertRaises(SystemExit) as ctx:
            self.run_cli('cost-curve', '--samples', 'many')
        self.assertEqual(ctx.exception.code, 1)

    def test_missing_config_file(self):
        code, _ = self.run_cli('besov', '--config', str(Path(self.tmp.name) / 'missing.yaml'))
        self.assertEqual(code, 2)

    def test_unresolved_scales(self):
        code, _ = self.run_cli('besov', '--n', '64', '--output-dir', str(self.out))
        self.assertEqual(code, 3)

    def test_failing_criterion(self):
        with patch.object(AcceptanceSuite, 'check_cost', return_value=(False, {})):
            code, _ = self.run_cli('verify-all', '--only', '7', '--output-dir', str(self.out))
        self.assertEqual(code, 4)
        report = json.loads((self.out / 'verify-all.json').read_text())
        self.assertFalse(report['success'])


class TestCommands(CliTestCase):
    def test_cost_curve(self):
        code, _ = self.run_cli('cost-curve', '--samples', '10', '--output-dir', str(self.out))
        self.assertEqual(code, 0)
        lines = (self.out / 'cost-curve.csv').read_text().splitlines()
        self.assertEqual(lines[0], 's,c,s3_over_6')
        self.assertEqual(len(lines), 11)

    def test_cost_curve_is_deterministic(self):
        first, second = self.out / 'a', self.out / 'b'
        self.run_cli('cost-curve', '--cost-curve', '25', '--output-dir', str(first))
        self.run_cli('cost-curve', '--cost-curve', '25', '--output-dir', str(second))
        self.assertEqual((first / 'cost-curve.csv').read_bytes(), (second / 'cost-curve.csv').read_bytes())

    def test_gen_field(self):
        code, stdout = self.run_cli('gen-field', '--kind', 'vortex', '--n', '64', '--json',
                                    '--output-dir', str(self.out))
        self.assertEqual(code, 0)
        report = json.loads(stdout)
        self.assertEqual(report['masked_cells'], 1)
        self.assertTrue((self.out / 'vortex-n64.json').exists())
        self.assertEqual((self.out / 'vortex-n64.bin').stat().st_size, 64 * 64 * 8)

    def test_coercivity(self):
        code, stdout = self.run_cli('coercivity', '--samples', '200', '--json', '--output-dir', str(self.out))
        self.assertEqual(code, 0)
        report = json.loads(stdout)
        self.assertAlmostEqual(report['ratio_at_half_pi'], math.pi - 2.0)
        self.assertEqual(len((self.out / 'coercivity.csv').read_text().splitlines()), 201)

    def test_verify_subset(self):
        code, _ = self.run_cli('verify-all', '--only', '2', '5', '7', '--output-dir', str(self.out),
                               '--report', 'subset.json')
        self.assertEqual(code, 0)
        report = json.loads((self.out / 'subset.json').read_text())
        self.assertEqual([c['id'] for c in report['criteria']], [2, 5, 7])
        self.assertTrue(report['success'])

    def test_plugin_list(self):
        code, stdout = self.run_cli('plugin', 'list', '--json')
        self.assertEqual(code, 0)
        self.assertEqual(len(json.loads(stdout)), 6)

    def test_kinetic_check_reads_field(self):
        code, _ = self.run_cli('gen-field', '--kind', 'jump', '--beta', '0.6', '--rotation', '0.4', '--n', '64',
                               '--output-dir', str(self.out))
        self.assertEqual(code, 0)
        code, stdout = self.run_cli('kinetic-check', '--field', str(self.out / 'jump-n64.json'), '--n', '64',
                                    '--samples', '1024', '--json', '--output-dir', str(self.out))
        self.assertEqual(code, 0)
        report = json.loads(stdout)
        self.assertAlmostEqual(report['beta'], 0.6, places=12)
        self.assertEqual(report['n'], 64)
        self.assertAlmostEqual(report['jump']['normal'][0], math.cos(0.4), places=12)
        self.assertTrue(report['success'])

    def test_kinetic_check_needs_jump_field(self):
        self.run_cli('gen-field', '--kind', 'vortex', '--n', '64', '--output-dir', str(self.out))
        code, _ = self.run_cli('kinetic-check', '--field', str(self.out / 'vortex-n64.json'), '--n', '64',
                               '--samples', '1024', '--output-dir', str(self.out))
        self.assertEqual(code, 1)

    def test_plugin_list_after_disable(self):
        self.assertEqual(self.run_cli('plugin', 'disable', 'cost')[0], 0)
        self.assertTrue((Path(self.tmp.name) / '.eikolab' / 'plugins.json').exists())
        PluginManager._instance = None
        code, stdout = self.run_cli('plugin', 'list', '--json')
        self.assertEqual(code, 0)
        rows = {row['name']: row for row in json.loads(stdout)}
        self.assertFalse(rows['cost']['enabled'])
        self.assertFalse(rows['cost']['loaded'])
        self.assertTrue(rows['kinetic']['loaded'])


class TestExperimentPlugins(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.stderr = patch('sys.stderr', new_callable=io.StringIO)
        self.stderr.start()

    def tearDown(self):
        self.stderr.stop()
        self.tmp.cleanup()

    def config(self, n):
        return ExperimentConfig(n=n, output_dir=self.tmp.name, threads=2)

    def test_production_reports_resolved_lub(self):
        beta = math.pi / 4
        grid_field = make_jump_field(JumpConfig.symmetric(beta), (0.47, 0.5), n=128)
        probes = MeasureProbes(grid_field, self.config(128))
        self.assertEqual(probes.production(4.0 / 128, 32), 0)
        expected = (2.0 * math.sin(beta)) ** 3 / 3.0
        self.assertAlmostEqual(probes.result['lub_jin_kohn_per_length'] / expected, 1.0, delta=0.05)
        self.assertEqual(probes.result['lub_block'], 16)
        self.assertGreater(probes.result['lub_jin_kohn_cellwise_tv'], probes.result['lub_jin_kohn_tv'])

    def test_kinetic_checks(self):
        checks = KineticChecks(self.config(64))
        self.assertEqual(checks.run(math.pi / 4, 1024), 0)
        self.assertEqual(checks.result['profile_sign'], 1)
        self.assertLessEqual(checks.result['profile_l1_error'], 1e-3)
        self.assertTrue(Path(checks.result['outputs'][0]).exists())

    def test_delta_decay(self):
        scans = InteractionScans(self.config(256))
        grid_field = make_jump_field(JumpConfig.symmetric(math.pi / 4), n=256)
        self.assertEqual(scans.delta_decay(grid_field), 0)
        self.assertAlmostEqual(scans.result['exponent'], 1.0, delta=0.05)

    def test_jk_quartic(self):
        scans = InteractionScans(self.config(256))
        grid_field = make_jump_field(JumpConfig.symmetric(math.pi / 4), n=256)
        self.assertEqual(scans.jk_quartic(10_000, grid_field), 0)
        self.assertGreater(scans.result['minimum'], 0.0)
        self.assertAlmostEqual(scans.result['increment_exponent'], 1.0, delta=0.05)


class TestRefinementHelpers(unittest.TestCase):
    def test_ratios(self):
        self.assertEqual(refinement_ratios([4.0, 2.0, 1.0]), [2.0, 2.0])
        self.assertEqual(refinement_ratios([1.0, 0.0]), [math.inf])

    def test_decreases_by(self):
        self.assertTrue(decreases_by([4.0, 2.0, 1.0], 1.7))
        self.assertFalse(decreases_by([4.0, 3.0], 1.7))
        # values already at round-off pass
        self.assertTrue(decreases_by([1e-13, 1e-13], 1.7))


if __name__ == '__main__':
    unittest.main()
