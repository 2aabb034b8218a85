import numpy as np
from django.test import SimpleTestCase

from tiling.exceptions import MissingControlPoints, WindowTooSmall
from tiling.models import TilingPatch
from tiling.services.geometry import ControlPointService, FixedPointService
from tiling.services.loader import RuleLoader
from tiling.services.local import LocalStructureService, min_distance
from tiling.services.substitution import SubstitutionService
from tiling.tests import PHI, uniform_rule


def patch_with_control_points(rule, k, label=1):
    patch = SubstitutionService.expand(rule, TilingPatch.single(label, np.zeros(rule.d)), k)
    return ControlPointService.control_points(rule, patch)


def keys(vectors, decimals=7):
    return {tuple(np.round(v, decimals).tolist()) for v in vectors}


class ReturnVectorTest(SimpleTestCase):
    """Tests for return vectors and periods"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.rule = RuleLoader.load_fixture("fib.json")
        cls.patch = patch_with_control_points(cls.rule, 10)

    def test_single_tile(self):
        patch = ControlPointService.control_points(self.rule, TilingPatch.single(1, [3.0]))
        np.testing.assert_array_equal(LocalStructureService.return_vectors(patch).vectors, [[0.0]])

    def test_fibonacci_vectors_in_golden_module(self):
        xi = LocalStructureService.return_vectors(self.patch, window=40.0)
        values = xi.vectors[:, 0]
        n = np.arange(-80, 81)
        residual = values[:, np.newaxis] - n[np.newaxis, :] * PHI
        self.assertTrue(np.all(np.min(np.abs(residual - np.rint(residual)), axis=1) < 1e-6))
        self.assertAlmostEqual(float(np.min(values[values > 1e-9])), 1.0, places=9)

    def test_negation_and_zero(self):
        xi = LocalStructureService.return_vectors(self.patch, window=20.0)
        found = keys(xi.vectors)
        self.assertIn((0.0,), found)
        self.assertEqual(found, keys(-xi.vectors))

    def test_window_nesting(self):
        small = LocalStructureService.return_vectors(self.patch, window=10.0)
        large = LocalStructureService.return_vectors(self.patch, window=20.0)
        self.assertLessEqual(keys(small.vectors), keys(large.vectors))
        self.assertEqual(set(small.by_type), {1, 2})

    def test_forward_invariance(self):
        small = LocalStructureService.return_vectors(self.patch, window=10.0)
        large = LocalStructureService.return_vectors(self.patch, window=PHI * 10.0 + 1e-6)
        images = small.vectors[:, 0] * PHI
        distances = np.min(np.abs(images[:, np.newaxis] - large.vectors[np.newaxis, :, 0]), axis=1)
        self.assertLess(float(distances.max()), 1e-8)

    def test_fibonacci_has_no_periods(self):
        self.assertEqual(len(LocalStructureService.periods(self.patch, window=20.0)), 0)

    def test_periodic_rule_periods(self):
        rule = uniform_rule(2)
        patch = patch_with_control_points(rule, 6)
        periods = LocalStructureService.periods(patch, window=10.0)[:, 0]
        self.assertIn(1.0, periods)
        self.assertIn(-1.0, periods)
        np.testing.assert_allclose(periods, np.rint(periods), atol=1e-9)

    def test_requires_control_points(self):
        with self.assertRaises(MissingControlPoints):
            LocalStructureService.return_vectors(TilingPatch.single(1, [0.0]))


class LocalComplexityTest(SimpleTestCase):
    """Tests for patch classes and repetitivity gaps"""

    def setUp(self):
        self.rule = RuleLoader.load_fixture("fib.json")

    def test_census_stabilizes(self):
        smaller = LocalStructureService.flc_census(patch_with_control_points(self.rule, 10), 2.0)
        larger = LocalStructureService.flc_census(patch_with_control_points(self.rule, 12), 2.0)
        self.assertGreater(smaller.classes, 1)
        self.assertEqual(smaller.classes, larger.classes)
        self.assertGreater(larger.sampled, smaller.sampled)

    def test_return_gap(self):
        census = LocalStructureService.flc_census(patch_with_control_points(self.rule, 10), 2.0)
        self.assertGreater(census.max_return_gap, 0.0)
        self.assertLess(census.max_return_gap, PHI ** 10)

    def test_small_patch(self):
        with self.assertRaises(WindowTooSmall):
            LocalStructureService.flc_census(patch_with_control_points(self.rule, 3), 2.0)


class MeyerGapTest(SimpleTestCase):
    """Tests for the difference-set gap"""

    def test_integer_lattice(self):
        self.assertAlmostEqual(LocalStructureService.meyer_gap(np.arange(-50, 51), 10.0), 1.0)

    def test_single_point(self):
        with self.assertRaises(WindowTooSmall):
            LocalStructureService.meyer_gap(np.array([[0.0], [30.0]]), 10.0)

    def test_min_distance_matches_brute_force(self):
        points = np.random.default_rng(3).uniform(-5, 5, size=(300, 2))
        pairwise = np.linalg.norm(points[:, np.newaxis] - points[np.newaxis], axis=2)
        np.fill_diagonal(pairwise, np.inf)
        self.assertAlmostEqual(min_distance(points), float(pairwise.min()), places=12)

    def gaps(self, name, windows):
        rule = RuleLoader.load_fixture(name)
        seed = FixedPointService.fixed_point_seed(rule)
        patch = ControlPointService.control_points(
            rule, FixedPointService.grow_to_radius(rule, seed, max(windows))
        )
        center = ControlPointService.seed_control_point(rule, seed)
        return [LocalStructureService.meyer_gap(patch.control_points, w, center) for w in windows]

    def test_fibonacci_gap_stable(self):
        gaps = self.gaps("fib.json", [10.0, 20.0, 40.0, 80.0])
        self.assertTrue(all(a >= b for a, b in zip(gaps, gaps[1:])))
        self.assertGreaterEqual(min(gaps), 0.9 * max(gaps))

    def test_nonpisot_gap_shrinks(self):
        first, last = self.gaps("nonpisot1d.json", [10.0, 80.0])
        self.assertLessEqual(last, 0.5 * first)
