import unittest
from unittest.mock import patch
from pathlib import Path
import sys
import os
import csv
import json
import tempfile
import threading

import numpy as np

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import ExperimentConfig
from plugin_manager import PluginManager
from plugins.base import BasePlugin
from plugins.shared_helpers import format_cell, parallel_map, thread_limit

class SamplePlugin(BasePlugin):
    def get_default_config(self):
        return {'scan': {'samples': 100, 'label': None}}

class TestBasePlugin(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = ExperimentConfig(output_dir=self.tmp.name, threads=2)
        self.plugin = SamplePlugin('test-plugin', self.config)

    def tearDown(self):
        self.tmp.cleanup()

    @patch('plugins.base.load_config_file')
    def test_load_config(self, mock_load):
        mock_load.return_value = {'scan': {'samples': 5}}
        with patch.object(Path, 'exists', return_value=True):
            config = self.plugin._load_config()
            self.assertEqual(config['scan']['samples'], 5)
            self.assertIn('label', config['scan'])

    @patch('plugins.base.load_config_file', side_effect=ValueError('broken'))
    def test_broken_config_falls_back(self, _mock_load):
        with patch.object(Path, 'exists', return_value=True):
            self.assertEqual(self.plugin._load_config()['scan']['samples'], 100)

    def test_get_config(self):
        self.assertEqual(self.plugin.get_config('scan.samples'), 100)
        self.assertEqual(self.plugin.get_config('scan.label', 'none'), 'none')
        self.assertEqual(self.plugin.get_config('missing.key', 3), 3)

    def test_write_probe_csv(self):
        path = self.plugin.write_probe_csv('probe.csv', [('jump-n64', 'production', 0.25, 1.5, None)])
        with open(path, newline='') as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(rows[0]['value'], '1.5000000000e+00')
        self.assertEqual(rows[0]['residual'], '')
        self.assertIn(str(path), self.plugin.result['outputs'])

    def test_write_report(self):
        self.plugin.result['values'] = np.array([1.0, 2.0])
        text = self.plugin.write_report('report.json')
        data = json.loads((Path(self.tmp.name) / 'report.json').read_text())
        self.assertEqual(data['values'], [1.0, 2.0])
        self.assertIn('seconds', data)
        self.assertEqual(json.loads(text)['plugin'], 'test-plugin')

    def test_map_keeps_order(self):
        self.assertEqual(self.plugin.map(lambda x: x * x, range(10)), [x * x for x in range(10)])

class TestSharedHelpers(unittest.TestCase):
    def test_format_cell(self):
        self.assertEqual(format_cell(0.1), '1.0000000000e-01')
        self.assertEqual(format_cell(np.float64(2.0)), '2.0000000000e+00')
        self.assertEqual(format_cell(True), 'true')
        self.assertEqual(format_cell(3), '3')

    @patch.dict(os.environ, {'EIKONAL_LAB_THREADS': '3'})
    def test_thread_limit(self):
        self.assertEqual(thread_limit(), 3)
        self.assertEqual(thread_limit(1), 1)

    def test_single_thread_runs_inline(self):
        names = set()

        def record(x):
            names.add(threading.current_thread().name)
            return x + 1

        self.assertEqual(parallel_map(record, [1, 2, 3], threads=1), [2, 3, 4])
        self.assertEqual(names, {threading.current_thread().name})

class TestPluginManager(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        PluginManager._instance = None
        self.home = patch.object(Path, 'home', return_value=Path(self.tmp.name))
        self.home.start()

    def tearDown(self):
        self.home.stop()
        PluginManager._instance = None
        self.tmp.cleanup()

    def test_builtin_plugins(self):
        manager = PluginManager()
        self.assertTrue(manager.load_plugins())
        names = [p.name for p in manager.list_plugins()]
        self.assertEqual(names, ['fields', 'measures', 'interaction', 'cost', 'kinetic', 'acceptance'])
        self.assertIs(manager, PluginManager())

    def test_disable_persists(self):
        manager = PluginManager()
        manager.load_plugins()
        self.assertTrue(manager.disable_plugin('cost'))
        self.assertFalse(manager.disable_plugin('nope'))

        PluginManager._instance = None
        reloaded = PluginManager()
        reloaded.load_plugins()
        self.assertFalse(reloaded.is_plugin_enabled('cost'))
        self.assertIsNone(reloaded.get_plugin_module('cost'))
        self.assertTrue(reloaded.is_plugin_enabled('kinetic'))

if __name__ == '__main__':
    unittest.main()
