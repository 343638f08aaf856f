#!/usr/bin/env python3
"""
Unit tests for coc_config.py
Defaults, config-file layering and CLI overrides
"""

import unittest
import tempfile
import json
import shutil
from pathlib import Path
import sys
import os

import numpy as np

# Add parent directory to path to import coc modules
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from coc_config import DEFAULT_TOLERANCES, Tolerances, load_settings
from coc_errors import ConfigError


class TestSettings(unittest.TestCase):
    """Layered settings resolution"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.config_path = Path(self.temp_dir) / "settings.json"

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def write(self, data):
        self.config_path.write_text(json.dumps(data))
        return self.config_path

    def test_defaults(self):
        settings = load_settings()
        self.assertEqual(settings.tolerances.rank, 1e-9)
        self.assertEqual(settings.tolerances.levi, 1e-7)
        self.assertEqual(settings.tolerances.seed, 0xC0AD)
        self.assertEqual(settings.walk.steps, 50_000)
        self.assertEqual(settings.walk.escape, 100.0)

    def test_file_layer(self):
        settings = load_settings(self.write({"tolerances": {"num": 1e-8}, "walk": {"eps": 0.2}}))
        self.assertEqual(settings.tolerances.num, 1e-8)
        self.assertEqual(settings.tolerances.rank, 1e-9)
        self.assertEqual(settings.walk.eps, 0.2)

    def test_overrides_beat_file(self):
        path = self.write({"tolerances": {"num": 1e-8, "seed": 5}})
        settings = load_settings(path, {"tolerances": {"num": 1e-7, "seed": None}})
        self.assertEqual(settings.tolerances.num, 1e-7)
        self.assertEqual(settings.tolerances.seed, 5)

    def test_unknown_keys_rejected(self):
        with self.assertRaises(ConfigError):
            load_settings(self.write({"tolerances": {"ranks": 1e-9}}))
        with self.assertRaises(ConfigError):
            load_settings(self.write({"logging": {}}))

    def test_bad_values_rejected(self):
        with self.assertRaises(ConfigError):
            load_settings(self.write({"tolerances": {"num": -1}}))
        with self.assertRaises(ConfigError):
            load_settings(self.write({"walk": {"eps": "wide"}}))
        with self.assertRaises(ConfigError):
            load_settings(None, {"tolerances": {"seed": -3}})

    def test_missing_and_malformed_files(self):
        with self.assertRaises(ConfigError):
            load_settings(Path(self.temp_dir) / "nope.json")
        self.config_path.write_text("{not json")
        with self.assertRaises(ConfigError):
            load_settings(self.config_path)


class TestTolerances(unittest.TestCase):
    """Absolute thresholds derived from the data"""

    def test_rank_threshold_scales(self):
        self.assertAlmostEqual(DEFAULT_TOLERANCES.rank_threshold(np.array([4.0, 1.0]), 3), 1.2e-8)
        self.assertEqual(DEFAULT_TOLERANCES.rank_threshold(np.array([]), 3), 0.0)

    def test_alg_and_levi_thresholds(self):
        c = np.zeros((2, 2, 2))
        c[0, 1, 1], c[1, 0, 1] = 3.0, -3.0
        tol = Tolerances(alg=1e-6)
        self.assertAlmostEqual(tol.alg_threshold(c), 4e-6)
        self.assertAlmostEqual(DEFAULT_TOLERANCES.levi_threshold(np.zeros((2, 2, 2))), 1e-7)


if __name__ == '__main__':
    unittest.main()
