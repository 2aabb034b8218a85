import json
import tempfile
from pathlib import Path

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings
from rest_framework import serializers

from algebra.models import IntPolynomial
from expansion.services.linear import ExpansionService
from tiling.exceptions import InvalidRule, NoSeedFound, ResourceLimit
from tiling.models import Prototile, SubstitutionRule, TilingPatch
from tiling.services.geometry import ControlPointService, FixedPointService
from tiling.services.loader import RuleLoader
from tiling.services.substitution import SubstitutionService

PHI = (1 + 5 ** 0.5) / 2
LAMBDA = float(np.max(np.roots([1, 0, -1, -3]).real))
FIB_MATRIX = np.array([[1, 1], [1, 0]])


def fibonacci_rule(len_a=1.0, len_b=PHI - 1, first_digits=None, tile_map=(0, 0)):
    """a -> a b, b -> a on intervals [0, len_a] and [0, len_b]."""
    digits = {(1, 1): [[0.0]], (2, 1): [[len_a]], (1, 2): [[0.0]]}
    if first_digits is not None:
        digits[(1, 1)] = first_digits
    return SubstitutionRule(
        prototiles=(Prototile(1, [[0.0, len_a]]), Prototile(2, [[0.0, len_b]])),
        digits=digits,
        expansion=ExpansionService.build(IntPolynomial((-1, -1, 1)), [PHI]),
        tile_map=tile_map,
    )


def uniform_rule(scale=2, label_swap=False):
    """
    One interval type cut into ``scale`` unit pieces, or two unit types that
    swap under substitution (a -> bb, b -> aa) when ``label_swap`` is set.
    """
    phi = ExpansionService.build(IntPolynomial((-scale, 1)), [float(scale)])
    pieces = [[float(k)] for k in range(scale)]
    if label_swap:
        return SubstitutionRule(
            prototiles=(Prototile(1, [[0.0, 1.0]]), Prototile(2, [[0.0, 1.0]])),
            digits={(2, 1): pieces, (1, 2): pieces},
            expansion=phi,
            tile_map=(0, 0),
        )
    return SubstitutionRule(
        prototiles=(Prototile(1, [[0.0, 1.0]]),),
        digits={(1, 1): pieces},
        expansion=phi,
        tile_map=(0,),
    )


def tile_keys(patch, decimals=9):
    return {
        (int(label), *np.round(t, decimals).tolist())
        for label, t in zip(patch.labels, patch.translations)
    }


class SubstitutionMatrixTest(SimpleTestCase):
    """Tests for the substitution matrix and primitivity"""

    def test_fibonacci_matrix(self):
        matrix = SubstitutionService.substitution_matrix(RuleLoader.load_fixture("fib.json"))
        np.testing.assert_array_equal(matrix, FIB_MATRIX)
        self.assertTrue(SubstitutionService.is_primitive(matrix))

    def test_nonpisot_matrix(self):
        matrix = SubstitutionService.substitution_matrix(RuleLoader.load_fixture("nonpisot1d.json"))
        np.testing.assert_array_equal(matrix, [[0, 0, 3], [1, 0, 1], [0, 1, 0]])
        self.assertTrue(SubstitutionService.is_primitive(matrix))

    def test_primitivity_examples(self):
        self.assertTrue(SubstitutionService.is_primitive(np.array([[1]])))
        self.assertFalse(SubstitutionService.is_primitive(np.array([[2, 0], [0, 2]])))
        self.assertFalse(SubstitutionService.is_primitive(np.array([[0, 2], [2, 0]])))
        self.assertTrue(SubstitutionService.is_primitive(np.array([[0, 1], [1, 1]])))

    def test_wielandt_extremal_matrix(self):
        """The cyclic matrix with one extra entry needs exactly kappa^2 - 2 kappa + 2 steps."""
        kappa = 4
        matrix = np.roll(np.eye(kappa, dtype=int), 1, axis=0)
        matrix[0, kappa - 2] = 1
        self.assertTrue(SubstitutionService.is_primitive(matrix))
        power = np.linalg.matrix_power(matrix, kappa * kappa - 2 * kappa + 1)
        self.assertFalse(np.all(power > 0))


class ExpandTest(SimpleTestCase):
    """Tests for omega^k on patches"""

    def setUp(self):
        self.rule = RuleLoader.load_fixture("fib.json")
        self.seed = TilingPatch.single(1, [0.0])

    def test_fibonacci_counts(self):
        five = SubstitutionService.expand(self.rule, self.seed, 5)
        self.assertEqual(len(five), 13)
        np.testing.assert_array_equal(five.census(2), [8, 5])

        eight = SubstitutionService.expand(self.rule, self.seed, 8)
        self.assertEqual(len(eight), 55)
        np.testing.assert_array_equal(eight.census(2), [34, 21])
        self.assertEqual(eight.generation, 8)

    def test_child_order(self):
        patch = SubstitutionService.expand(self.rule, self.seed, 2)
        np.testing.assert_array_equal(patch.labels, [1, 2, 1])
        np.testing.assert_allclose(patch.translations[:, 0], [0.0, 1.0, PHI])

    def test_zero_steps_is_identity(self):
        self.assertIs(SubstitutionService.expand(self.rule, self.seed, 0), self.seed)

    def test_census_follows_matrix_powers(self):
        rng = np.random.default_rng(7)
        for name in ("fib.json", "nonpisot1d.json", "fib_x_nonpisot.json"):
            rule = RuleLoader.load_fixture(name)
            matrix = SubstitutionService.substitution_matrix(rule)
            patch = TilingPatch(
                labels=rng.integers(1, rule.kappa + 1, size=5),
                translations=rng.normal(size=(5, rule.d)) * 10,
            )
            for k in range(7):
                expected = np.linalg.matrix_power(matrix, k) @ patch.census(rule.kappa)
                expanded = SubstitutionService.expand(rule, patch, k)
                np.testing.assert_array_equal(expanded.census(rule.kappa), expected)

    def test_subdivision_partitions_the_inflated_seed(self):
        patch = SubstitutionService.expand(self.rule, self.seed, 8)
        order = np.argsort(patch.translations[:, 0])
        starts = patch.translations[order, 0]
        lengths = np.where(patch.labels[order] == 1, 1.0, PHI - 1)
        np.testing.assert_allclose(starts[1:], (starts + lengths)[:-1], atol=1e-9)
        self.assertAlmostEqual(starts[-1] + lengths[-1], PHI ** 8, places=9)

    @override_settings(TILING={**settings.TILING, "TILE_CAP": 100})
    def test_tile_cap(self):
        with self.assertRaises(ResourceLimit):
            SubstitutionService.expand(self.rule, self.seed, 10)
        self.assertEqual(len(SubstitutionService.expand(self.rule, self.seed, 9)), 89)

    def test_predicted_count(self):
        self.assertEqual(
            SubstitutionService.predicted_count(self.rule, self.seed.census(2), 8), 55
        )


class ValidateRuleTest(SimpleTestCase):
    """Tests for the subdivision checks"""

    def test_golden_lengths_valid(self):
        report = SubstitutionService.validate_rule(fibonacci_rule(PHI, 1.0))
        self.assertTrue(report.valid)
        self.assertTrue(report.primitive)

    def test_fixtures_valid(self):
        for name in ("fib.json", "nonpisot1d.json", "fib_x_fib.json", "fib_x_nonpisot.json"):
            self.assertTrue(SubstitutionService.validate_rule(RuleLoader.load_fixture(name)).valid, name)

    def test_unit_lengths_fail_volume(self):
        report = SubstitutionService.validate_rule(fibonacci_rule(1.0, 1.0))
        self.assertFalse(report.valid)
        self.assertIn("volume", {v.kind for v in report.violations})
        self.assertEqual({v.parent for v in report.violations if v.kind == "volume"}, {1, 2})

    def test_overlapping_digits(self):
        rule = fibonacci_rule(PHI, 1.0, first_digits=[[0.0], [PHI / 2]])
        report = SubstitutionService.validate_rule(rule)
        overlaps = [v for v in report.violations if v.kind == "overlap"]
        self.assertTrue(overlaps)
        self.assertEqual(overlaps[0].parent, 1)
        self.assertEqual(overlaps[0].digit, (0.0,))

    def test_child_outside_parent(self):
        rule = fibonacci_rule(PHI, 1.0)
        shifted = SubstitutionRule(
            prototiles=rule.prototiles,
            digits={(1, 1): [[0.0]], (2, 1): [[PHI + 0.5]], (1, 2): [[0.0]]},
            expansion=rule.expansion,
            tile_map=(0, 0),
        )
        report = SubstitutionService.validate_rule(shifted)
        self.assertIn(
            ("containment", 1, 2), {(v.kind, v.parent, v.child) for v in report.violations}
        )


class FixedPointSeedTest(SimpleTestCase):
    """Tests for seed search"""

    def test_fibonacci_seed(self):
        seed = FixedPointService.fixed_point_seed(RuleLoader.load_fixture("fib.json"))
        self.assertEqual((seed.label, seed.power), (1, 1))
        np.testing.assert_allclose(seed.position, [0.0], atol=1e-12)

    def test_nonpisot_needs_second_power(self):
        seed = FixedPointService.fixed_point_seed(RuleLoader.load_fixture("nonpisot1d.json"))
        self.assertEqual((seed.label, seed.power), (2, 2))
        np.testing.assert_allclose(seed.position, [-LAMBDA], atol=1e-9)

    def test_swapping_rule_needs_second_power(self):
        seed = FixedPointService.fixed_point_seed(uniform_rule(2, label_swap=True))
        self.assertEqual((seed.label, seed.power), (1, 2))

    def test_product_seed(self):
        seed = FixedPointService.fixed_point_seed(RuleLoader.load_fixture("fib_x_nonpisot.json"))
        self.assertEqual((seed.label, seed.power), (2, 2))
        np.testing.assert_allclose(seed.position, [0.0, -LAMBDA], atol=1e-9)

    def test_requested_type(self):
        seed = FixedPointService.fixed_point_seed(RuleLoader.load_fixture("fib.json"), label=2)
        self.assertEqual(seed.power, 2)
        np.testing.assert_allclose(seed.position, [1 - PHI], atol=1e-12)

    @override_settings(TILING={**settings.TILING, "SEED_SEARCH_DEPTH": 1})
    def test_search_depth_exhausted(self):
        with self.assertRaises(NoSeedFound):
            FixedPointService.fixed_point_seed(RuleLoader.load_fixture("nonpisot1d.json"))

    def test_iterates_nest(self):
        for name in ("fib.json", "nonpisot1d.json", "fib_x_fib.json"):
            rule = RuleLoader.load_fixture(name)
            seed = FixedPointService.fixed_point_seed(rule)
            previous = seed.patch
            for _ in range(3):
                current = SubstitutionService.expand(rule, previous, seed.power)
                self.assertLessEqual(tile_keys(previous), tile_keys(current), name)
                previous = current

    def test_grow_stops_below_target(self):
        rule = RuleLoader.load_fixture("fib.json")
        patch = FixedPointService.grow(rule, FixedPointService.fixed_point_seed(rule), 1500)
        self.assertEqual(len(patch), 987)


class ControlPointTest(SimpleTestCase):
    """Tests for control points"""

    def test_leftmost_choice_gives_left_endpoints(self):
        rule = RuleLoader.load_fixture("fib.json")
        np.testing.assert_allclose(ControlPointService.offsets(rule), [[0.0], [0.0]], atol=1e-13)

    def test_rightmost_choice_matches_iteration(self):
        rule = RuleLoader.load_fixture("fib.json").with_tile_map((1, 0))
        x_a = x_b = 0.0
        for _ in range(200):
            x_a, x_b = (1.0 + x_b) / PHI, x_a / PHI
        offsets = ControlPointService.offsets(rule)
        np.testing.assert_allclose(offsets[:, 0], [x_a, x_b], atol=1e-12)
        np.testing.assert_allclose(offsets[:, 0], [1.0, PHI - 1], atol=1e-12)

    def test_phi_maps_control_points_to_designated_children(self):
        for name, tile_map in (
            ("fib.json", (1, 0)),
            ("nonpisot1d.json", (0, 0, 3)),
            ("fib_x_nonpisot.json", None),
        ):
            rule = RuleLoader.load_fixture(name)
            if tile_map is not None:
                rule = rule.with_tile_map(tile_map)
            patch = SubstitutionService.expand(rule, TilingPatch.single(1, np.zeros(rule.d)), 6)
            patch = ControlPointService.control_points(rule, patch)
            labels, translations = ControlPointService.designated_children(rule, patch)
            images = translations + ControlPointService.offsets(rule)[labels - 1]
            np.testing.assert_allclose(
                ExpansionService.apply(rule.expansion, patch.control_points), images, atol=1e-10
            )

    def test_same_type_offsets_agree(self):
        rule = RuleLoader.load_fixture("nonpisot1d.json").with_tile_map((0, 0, 2))
        patch = ControlPointService.control_points(
            rule, SubstitutionService.expand(rule, TilingPatch.single(3, [0.0]), 5)
        )
        for label in range(1, 4):
            shifts = (patch.control_points - patch.translations)[patch.labels == label]
            np.testing.assert_allclose(shifts, np.broadcast_to(shifts[0], shifts.shape), atol=1e-12)


class DirectProductTest(SimpleTestCase):
    """Tests for direct products"""

    def test_kronecker_identity(self):
        product = RuleLoader.load_fixture("fib_x_fib.json")
        self.assertEqual(product.kappa, 4)
        np.testing.assert_array_equal(
            SubstitutionService.substitution_matrix(product), np.kron(FIB_MATRIX, FIB_MATRIX)
        )

    def test_mixed_expansion(self):
        product = RuleLoader.load_fixture("fib_x_nonpisot.json")
        self.assertFalse(product.expansion.homogeneous)
        np.testing.assert_allclose(np.diag(product.expansion.matrix), [PHI, LAMBDA], atol=1e-9)
        first = SubstitutionService.substitution_matrix(RuleLoader.load_fixture("nonpisot1d.json"))
        np.testing.assert_array_equal(
            SubstitutionService.substitution_matrix(product), np.kron(FIB_MATRIX, first)
        )

    def test_one_type_factor_relabels(self):
        fib = RuleLoader.load_fixture("fib.json")
        product = SubstitutionService.direct_product(fib, uniform_rule(2))
        self.assertEqual(product.kappa, fib.kappa)
        np.testing.assert_array_equal(SubstitutionService.substitution_matrix(product), 2 * FIB_MATRIX)
        self.assertTrue(SubstitutionService.validate_rule(product).valid)

    def test_product_boxes(self):
        product = RuleLoader.load_fixture("fib_x_nonpisot.json")
        np.testing.assert_allclose(product.prototile(6).box, [[0.0, PHI - 1], [0.0, LAMBDA ** 2]], atol=1e-9)


class RuleLoaderTest(SimpleTestCase):
    """Tests for tiling spec files"""

    def write(self, directory, name, data):
        path = Path(directory) / name
        path.write_text(json.dumps(data) if not isinstance(data, str) else data)
        return path

    def fib_data(self):
        return json.loads(RuleLoader.fixture_path("fib.json").read_text())

    def test_zlambda_coordinates(self):
        rule = RuleLoader.load_fixture("fib.json")
        self.assertAlmostEqual(rule.prototile(2).volume, PHI - 1, places=12)
        self.assertEqual(rule.name, "fibonacci")

    def test_bad_digit_key(self):
        data = self.fib_data()
        data["digits"]["1-1"] = data["digits"].pop("1,1")
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(serializers.ValidationError):
                RuleLoader.load(self.write(directory, "bad.json", data))

    def test_tile_map_out_of_range(self):
        data = self.fib_data()
        data["tile_map"] = [0, 1]
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(serializers.ValidationError):
                RuleLoader.load(self.write(directory, "bad.json", data))

    def test_malformed_json(self):
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(serializers.ValidationError):
                RuleLoader.load(self.write(directory, "bad.json", "{\"prototiles\": ["))

    def test_tile_map_length_checked(self):
        with self.assertRaises(InvalidRule):
            fibonacci_rule(first_digits=None, tile_map=(0, 0, 0))

    def test_relative_product_paths(self):
        with tempfile.TemporaryDirectory() as directory:
            self.write(directory, "one.json", self.fib_data())
            path = self.write(directory, "both.json", {"direct_product": ["one.json", "one.json"]})
            self.assertEqual(RuleLoader.load(path).kappa, 4)
