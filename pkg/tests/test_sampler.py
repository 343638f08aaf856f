#!/usr/bin/env python3
"""
Unit tests for coc_sampler.py
Seeded orbit walks and the boundedness estimate
"""

import unittest
import sys
import os

import numpy as np

# Add parent directory to path to import coc modules
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from coc_catalog import catalog_get, catalog_names
from coc_classifier import OrbitClassifier, Verdict, classify
from coc_config import DEFAULT_WALK
from coc_sampler import (
    OrbitSample,
    WalkConfig,
    estimate_bounded,
    sample_many,
    sample_orbit,
    summary,
)


def algebra(name):
    return catalog_get(name).algebra


class TestWalk(unittest.TestCase):

    def test_fixed_point_does_not_move(self):
        sample = sample_orbit(algebra("heisenberg3"), [1.0, -2.0, 0.0], WalkConfig(steps=2000, seed=1))
        self.assertEqual(sample.steps, 2000)
        self.assertLess(sample.diameter, 1e-9)
        self.assertEqual(estimate_bounded(sample).status, "bounded")

    def test_su2_stays_on_the_sphere(self):
        sample = sample_orbit(algebra("su2"), [0.0, 0.0, 1.0], WalkConfig(steps=10_000, seed=2))
        self.assertTrue(np.allclose(sample.norms, 1.0, atol=1e-9))
        self.assertAlmostEqual(sample.max_norm, 1.0, places=9)

    def test_deterministic_for_a_seed(self):
        g = algebra("sl2R")
        first = sample_orbit(g, [1.0, 0.0, 0.0], WalkConfig(steps=500, seed=7))
        second = sample_orbit(g, [1.0, 0.0, 0.0], WalkConfig(steps=500, seed=7))
        other = sample_orbit(g, [1.0, 0.0, 0.0], WalkConfig(steps=500, seed=8))
        self.assertTrue(np.array_equal(first.points, second.points))
        self.assertFalse(np.array_equal(first.points, other.points))

    def test_batches_do_not_change_the_walk(self):
        g = algebra("su2")
        long = sample_orbit(g, [1.0, 0.0, 0.0], WalkConfig(steps=5000, seed=3))
        self.assertEqual(long.points.shape, (5001, 3))
        self.assertTrue(np.array_equal(long.points[0], [1.0, 0.0, 0.0]))

    def test_sample_many_keeps_seed_order(self):
        g = algebra("se2")
        config = WalkConfig(steps=300)
        samples = sample_many(g, [0.0, 1.0, 0.0], [5, 6, 7], config)
        self.assertEqual([s.config.seed for s in samples], [5, 6, 7])
        for seed, sample in zip((5, 6, 7), samples):
            single = sample_orbit(g, [0.0, 1.0, 0.0], WalkConfig(steps=300, seed=seed))
            self.assertTrue(np.array_equal(sample.points, single.points))

    def test_from_defaults(self):
        config = WalkConfig.from_defaults(DEFAULT_WALK, eps=0.5, steps=None, seed=4)
        self.assertEqual(config.eps, 0.5)
        self.assertEqual(config.steps, DEFAULT_WALK.steps)
        self.assertEqual(config.seed, 4)


class TestEstimate(unittest.TestCase):

    def test_su2_is_bounded(self):
        sample = sample_orbit(algebra("su2"), [0.0, 0.0, 1.0], WalkConfig(eps=0.2, steps=10_000, seed=11))
        estimate = estimate_bounded(sample)
        self.assertEqual(estimate.status, "bounded", estimate.notes)
        self.assertAlmostEqual(estimate.growth_ratio, 1.0, places=6)

    def test_heisenberg_escapes(self):
        sample = sample_orbit(algebra("heisenberg3"), [0.0, 0.0, 1.0], WalkConfig(eps=5.0, steps=10_000, seed=12))
        estimate = estimate_bounded(sample)
        self.assertEqual(estimate.status, "unbounded")
        self.assertGreater(estimate.growth_ratio, DEFAULT_WALK.escape)

    def test_short_walk_is_inconclusive(self):
        sample = sample_orbit(algebra("sl2R"), [1.0, 0.0, 0.0], WalkConfig(steps=10, seed=13))
        self.assertEqual(estimate_bounded(sample).status, "inconclusive")

    def test_overflow_counts_as_unbounded(self):
        config = WalkConfig(steps=10)
        points = np.array([[0.0, 1.0], [0.0, 2.0]])
        sample = OrbitSample(np.array([0.0, 1.0]), points, config, diverged_at=2)
        estimate = estimate_bounded(sample)
        self.assertEqual(estimate.status, "unbounded")
        self.assertEqual(estimate.growth_ratio, float("inf"))

    def test_collapse_toward_fixed_points_is_not_bounded(self):
        points = np.tile([1.0, 0.5], (2001, 1))
        derived = np.array([[0.0], [1.0]])
        steady = OrbitSample(points[0], points, WalkConfig(steps=2000), derived=derived)
        self.assertEqual(estimate_bounded(steady).status, "bounded")

        points = points.copy()
        points[1500, 1] = 1e-4
        dipped = OrbitSample(points[0], points, WalkConfig(steps=2000), derived=derived)
        estimate = estimate_bounded(dipped)
        self.assertEqual(estimate.status, "inconclusive")
        self.assertTrue(any("fixed-point space" in note for note in estimate.notes))

    def test_shrinking_norm_is_not_bounded(self):
        points = np.tile([1.0, 1.0], (2001, 1))
        points[700] = [1e-3, 0.0]
        estimate = estimate_bounded(OrbitSample(points[0], points, WalkConfig(steps=2000)))
        self.assertEqual(estimate.status, "inconclusive")
        self.assertTrue(any("norm fell" in note for note in estimate.notes))

    def test_summary_fields(self):
        sample = sample_orbit(algebra("su2"), [0.0, 1.0, 0.0], WalkConfig(steps=50, seed=14))
        data = summary(sample, estimate_bounded(sample))
        self.assertEqual(data["steps"], 50)
        self.assertEqual(data["seed"], 14)
        self.assertEqual(data["status"], "inconclusive")
        self.assertFalse(data["diverged"])


class TestOracleAgreement(unittest.TestCase):
    """Walk status against the classifier verdict"""

    CASES = [
        ("su2", [0.3, -0.4, 1.0]),
        ("su2+su2", [1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        ("se3", [0.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
        ("heisenberg3", [0.0, 0.0, 1.0]),
        ("se2", [0.0, 1.0, 0.0]),
        ("sl2R", [0.0, 1.0, -1.0]),
    ]

    def test_agreement(self):
        for name, f in self.CASES:
            g = algebra(name)
            verdict = classify(g, f).verdict
            sample = sample_orbit(g, f, WalkConfig(eps=0.3, steps=10_000, seed=21))
            status = estimate_bounded(sample).status
            if verdict.bounded:
                self.assertEqual(status, "bounded", name)
            else:
                self.assertNotEqual(status, "bounded", name)

    def test_aff1_contracting_walks_are_not_bounded(self):
        # the walk drives f_X toward 0 on some seeds and then looks stationary
        g = algebra("aff1")
        f = [-1.741, -0.699]
        self.assertEqual(classify(g, f).verdict, Verdict.UNBOUNDED)
        for sample in sample_many(g, f, range(20), WalkConfig()):
            estimate = estimate_bounded(sample)
            self.assertNotEqual(estimate.status, "bounded", (sample.config.seed, estimate.notes))


@unittest.skipUnless(os.environ.get("COC_SLOW_TESTS"), "set COC_SLOW_TESTS=1 for the full catalog sweep")
class TestCatalogSweep(unittest.TestCase):
    """Every catalog algebra, 20 covectors each, walks at the CLI defaults"""

    COVECTORS = 20
    NEAR_CRITERION = 1e-3

    def covectors(self, g, rng):
        annihilator = OrbitClassifier(g).criterion_space.complement()
        for k in range(self.COVECTORS):
            if k % 2 and annihilator.dim:
                yield annihilator.basis @ rng.standard_normal(annihilator.dim)
            else:
                yield rng.standard_normal(g.dim)

    def test_walks_never_contradict_the_verdict(self):
        rng = np.random.default_rng(61)
        for name in catalog_names():
            g = algebra(name)
            classifier = OrbitClassifier(g)
            for k, f in enumerate(self.covectors(g, rng)):
                verdict = classifier.verdict(f)
                distance = float(np.linalg.norm(classifier.criterion_space.coords(f)))
                if not verdict.bounded and distance <= self.NEAR_CRITERION * np.linalg.norm(f):
                    continue
                estimate = estimate_bounded(sample_orbit(g, f, WalkConfig(seed=k)))
                forbidden = "unbounded" if verdict.bounded else "bounded"
                self.assertNotEqual(estimate.status, forbidden, (name, k, estimate.notes))


if __name__ == '__main__':
    unittest.main()
