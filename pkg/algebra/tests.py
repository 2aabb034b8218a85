from fractions import Fraction

import mpmath
import numpy as np
from django.test import SimpleTestCase
from rest_framework import serializers

from algebra.exceptions import (
    InvalidPolynomial,
    InvalidSelection,
    NoDominantRealRoot,
    NonFinite,
    NonMonic,
    NotInvertible,
    NotIrreducible,
    NotSquarefree,
)
from algebra.models import IntPolynomial, RationalPolynomial, SpectrumSelection, Verdict
from algebra.serializers import IntPolynomialField, PolynomialFileSerializer
from algebra.services.arithmetic import ArithmeticService
from algebra.services.classification import PisotClassificationService
from algebra.services.roots import RootIsolationService

CUBIC = IntPolynomial((3, -4, -1, 1))
GOLDEN = IntPolynomial((-1, -1, 1))


class PolynomialModelTest(SimpleTestCase):
    """Unit tests for the polynomial value types"""

    def test_zero_leading_coefficient_rejected(self):
        with self.assertRaises(InvalidPolynomial):
            IntPolynomial((1, 0))

    def test_degree_and_monic(self):
        self.assertEqual(CUBIC.degree, 3)
        self.assertTrue(CUBIC.is_monic)
        with self.assertRaises(NonMonic):
            IntPolynomial((1, 2)).require_monic()

    def test_rational_division(self):
        """(x^2 - 1) = (x - 1)(x + 1) with zero remainder"""
        quotient, remainder = divmod(
            RationalPolynomial((-1, 0, 1)), RationalPolynomial((-1, 1))
        )
        self.assertEqual(quotient.coeffs, (Fraction(1), Fraction(1)))
        self.assertTrue(remainder.is_zero)

    def test_string_form(self):
        self.assertEqual(str(CUBIC), "x^3 - x^2 - 4x + 3")


class RootIsolationTest(SimpleTestCase):
    """Tests for certified root isolation"""

    def test_linear_root(self):
        roots = RootIsolationService.isolate_roots(IntPolynomial((-2, 1)))
        self.assertEqual(len(roots), 1)
        self.assertAlmostEqual(roots[0].value.real, 2.0, places=14)
        self.assertLessEqual(roots[0].radius, 1e-12)

    def test_cubic_roots_match_printed_values(self):
        roots = RootIsolationService.isolate_roots(CUBIC)
        values = [root.value.real for root in roots]
        self.assertAlmostEqual(values[0], 2.19869, places=5)
        self.assertAlmostEqual(values[1], -1.91223, places=5)
        self.assertAlmostEqual(values[2], 0.71354, places=5)
        self.assertTrue(all(root.is_real for root in roots))

    def test_golden_ratio_roots(self):
        roots = RootIsolationService.isolate_roots(GOLDEN)
        self.assertAlmostEqual(roots[0].value.real, (1 + 5 ** 0.5) / 2, places=12)
        self.assertAlmostEqual(roots[1].value.real, (1 - 5 ** 0.5) / 2, places=12)

    def test_conjugate_pairs_are_mirrored(self):
        """x^3 - x - 3 has one real root and a conjugate pair"""
        roots = RootIsolationService.isolate_roots(IntPolynomial((-3, -1, 0, 1)))
        self.assertTrue(roots[0].is_real)
        self.assertEqual(roots.pairing[1], 2)
        self.assertEqual(roots.pairing[2], 1)
        self.assertEqual(roots[1].value, roots[2].value.conjugate())
        self.assertGreater(roots[1].value.imag, 0)

    def test_disks_are_disjoint_and_tight(self):
        roots = RootIsolationService.isolate_roots(IntPolynomial((1, 0, 0, 0, 0, -1, 1)))
        for i, a in enumerate(roots):
            self.assertLessEqual(a.radius, 1e-12)
            for b in roots.roots[i + 1:]:
                self.assertGreater(abs(a.value - b.value), a.radius + b.radius)

    def test_vieta_relations(self):
        roots = RootIsolationService.isolate_roots(CUBIC)
        slack = 10 * sum(root.radius for root in roots) + 1e-13
        self.assertAlmostEqual(sum(roots.values).real, 1.0, delta=slack)
        self.assertAlmostEqual(np.prod(roots.values).real, -3.0, delta=slack * 10)

    def test_non_monic_rejected(self):
        with self.assertRaises(NonMonic):
            RootIsolationService.isolate_roots(IntPolynomial((1, 2)))

    def test_repeated_root_rejected(self):
        with self.assertRaises(NotSquarefree):
            RootIsolationService.isolate_roots(IntPolynomial((1, -2, 1)))


class ClassificationTest(SimpleTestCase):
    """Pisot, Perron and Pisot family verdicts"""

    def setUp(self):
        self.roots = RootIsolationService.isolate_roots(CUBIC)

    def test_two_large_roots_form_pisot_family(self):
        selection = SpectrumSelection.from_values(self.roots, [2.19869, -1.91223])
        self.assertEqual(PisotClassificationService.is_pisot_family(selection), Verdict.YES)

    def test_single_root_is_not_pisot_family(self):
        selection = SpectrumSelection.from_values(self.roots, [2.19869])
        self.assertEqual(PisotClassificationService.is_pisot_family(selection), Verdict.NO)

    def test_linear_polynomial_is_pisot_family(self):
        roots = RootIsolationService.isolate_roots(IntPolynomial((-2, 1)))
        selection = SpectrumSelection(roots, frozenset({0}))
        self.assertEqual(PisotClassificationService.is_pisot_family(selection), Verdict.YES)

    def test_family_verdict_is_monotone(self):
        small = SpectrumSelection(self.roots, frozenset({0}))
        large = SpectrumSelection(self.roots, frozenset({0, 1, 2}))
        self.assertEqual(PisotClassificationService.is_pisot_family(small), Verdict.NO)
        self.assertEqual(PisotClassificationService.is_pisot_family(large), Verdict.YES)

    def test_unit_circle_root_is_undecidable(self):
        """Salem polynomial: two conjugates sit exactly on the unit circle"""
        roots = RootIsolationService.isolate_roots(IntPolynomial((1, -1, -1, -1, 1)))
        selection = SpectrumSelection(roots, PisotClassificationService.expanding_selection(roots))
        self.assertEqual(
            PisotClassificationService.is_pisot_family(selection), Verdict.UNDECIDABLE
        )

    def test_selection_must_be_conjugation_closed(self):
        roots = RootIsolationService.isolate_roots(IntPolynomial((-3, -1, 0, 1)))
        with self.assertRaises(InvalidSelection):
            SpectrumSelection(roots, frozenset({1}))

    def test_pisot_and_perron_numbers(self):
        self.assertTrue(PisotClassificationService.is_pisot_number(GOLDEN))
        self.assertTrue(PisotClassificationService.is_perron_root(GOLDEN))
        self.assertFalse(PisotClassificationService.is_pisot_number(CUBIC))
        self.assertTrue(PisotClassificationService.is_perron_root(CUBIC))
        self.assertTrue(PisotClassificationService.is_pisot_number(IntPolynomial((-3, 1))))

    def test_no_dominant_real_root(self):
        with self.assertRaises(NoDominantRealRoot):
            PisotClassificationService.is_pisot_number(IntPolynomial((1, 0, 1)))

    def test_complex_perron(self):
        """x^2 - 2x + 2 has roots 1 +- i and nothing else"""
        roots = RootIsolationService.isolate_roots(IntPolynomial((2, -2, 1)))
        self.assertTrue(PisotClassificationService.is_complex_perron(roots, 0))

    def test_multiplicity_condition(self):
        # 2.199 dominates -1.912, so using -1.912 requires 2.199 at least as often
        self.assertFalse(
            PisotClassificationService.multiplicity_condition(self.roots, {1: 1})
        )
        self.assertFalse(
            PisotClassificationService.multiplicity_condition(self.roots, {0: 1, 1: 2})
        )
        self.assertTrue(
            PisotClassificationService.multiplicity_condition(self.roots, {0: 1})
        )
        self.assertTrue(
            PisotClassificationService.multiplicity_condition(self.roots, {0: 2, 1: 2})
        )

    def test_classify_report(self):
        report = PisotClassificationService.classify(CUBIC, [[0, 1], [0]])
        self.assertEqual(report["pisot_number"], "no")
        self.assertEqual(report["perron"], "yes")
        self.assertEqual([s["pisot_family"] for s in report["selections"]], ["yes", "no"])
        self.assertEqual(report["power_sums"][:3], ["1", "9", "4"])


class PowerSumTest(SimpleTestCase):
    """Exact Newton power sums"""

    def test_cubic(self):
        self.assertEqual(ArithmeticService.power_sums(CUBIC, 3), [1, 9, 4])

    def test_unit_root(self):
        self.assertEqual(ArithmeticService.power_sums(IntPolynomial((-1, 1)), 3), [1, 1, 1])

    def test_lucas_numbers(self):
        self.assertEqual(ArithmeticService.power_sums(GOLDEN, 4), [1, 3, 4, 7])

    def test_matches_certified_roots(self):
        roots = RootIsolationService.isolate_roots(CUBIC)
        radius = mpmath.mpf(roots.max_radius)
        top = mpmath.mpf(max(root.modulus for root in roots)) + radius
        exact = ArithmeticService.power_sums(CUBIC, 20)
        with mpmath.workdps(50):
            for n in range(1, 21):
                numeric = mpmath.fsum(mpmath.mpc(root.value) ** n for root in roots)
                bound = CUBIC.degree * n * top ** n * radius + mpmath.mpf(10) ** -30
                self.assertLessEqual(abs(numeric - exact[n - 1]), bound, msg=f"n={n}")

    def test_degree_forty_growth(self):
        sums = ArithmeticService.power_sums(GOLDEN, 40)
        self.assertEqual(sums[39], 228826127)


class FieldInverseTest(SimpleTestCase):
    """Inverses in Q[x]/(p)"""

    def test_golden_inverse(self):
        inverse = ArithmeticService.field_inverse(RationalPolynomial((0, 1)), GOLDEN)
        self.assertEqual(inverse.coeffs, (Fraction(-1), Fraction(1)))

    def test_identity(self):
        inverse = ArithmeticService.field_inverse(RationalPolynomial.one(), CUBIC)
        self.assertEqual(inverse.coeffs, (Fraction(1),))

    def test_cubic_inverse(self):
        inverse = ArithmeticService.field_inverse(RationalPolynomial((0, 1)), CUBIC)
        expected = RationalPolynomial((-4, -1, 1)) * Fraction(-1, 3)
        self.assertEqual(inverse, expected)

    def test_roundtrip_is_exact(self):
        q = RationalPolynomial((Fraction(1, 2), 3, Fraction(-7, 5)))
        inverse = ArithmeticService.field_inverse(q, CUBIC)
        self.assertTrue(((q * inverse - RationalPolynomial.one()) % CUBIC.as_rational()).is_zero)

    def test_zero_not_invertible(self):
        with self.assertRaises(NotInvertible):
            ArithmeticService.field_inverse(GOLDEN.as_rational(), GOLDEN)

    def test_reducible_modulus_detected(self):
        """x^2 - 1 = (x - 1)(x + 1); x - 1 shares a factor"""
        with self.assertRaises(NotIrreducible):
            ArithmeticService.field_inverse(RationalPolynomial((-1, 1)), IntPolynomial((-1, 0, 1)))


class DistanceTest(SimpleTestCase):
    """Distance to the nearest integer"""

    def test_examples(self):
        self.assertEqual(ArithmeticService.dist_to_integers(3.0), 0.0)
        self.assertEqual(ArithmeticService.dist_to_integers(2.5), 0.5)
        golden = (1 + 5 ** 0.5) / 2
        self.assertAlmostEqual(ArithmeticService.dist_to_integers(golden ** 2), 0.38197, places=5)

    def test_non_finite(self):
        with self.assertRaises(NonFinite):
            ArithmeticService.dist_to_integers(float("nan"))
        with self.assertRaises(NonFinite):
            ArithmeticService.dist_to_integers_array(np.array([1.0, np.inf]))

    def test_integer_shift_invariance(self):
        rng = np.random.default_rng(7)
        for x, k in zip(rng.uniform(-50, 50, 200), rng.integers(-1000, 1000, 200)):
            self.assertAlmostEqual(
                ArithmeticService.dist_to_integers(x),
                ArithmeticService.dist_to_integers(x + int(k)),
                places=9,
            )


class PolynomialSerializerTest(SimpleTestCase):
    """JSON polynomial format"""

    def test_parse_decimal_strings(self):
        field = IntPolynomialField()
        self.assertEqual(field.to_internal_value(["3", "-4", "-1", "1"]), CUBIC)
        self.assertEqual(field.to_representation(CUBIC), ["3", "-4", "-1", "1"])

    def test_rejects_garbage(self):
        with self.assertRaises(serializers.ValidationError):
            IntPolynomialField().to_internal_value(["1.5", "1"])

    def test_bare_list_file(self):
        serializer = PolynomialFileSerializer(data=["-1", "-1", "1"])
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["poly"], GOLDEN)

    def test_non_monic_file_rejected(self):
        serializer = PolynomialFileSerializer(data={"poly": ["1", "2"]})
        self.assertFalse(serializer.is_valid())
        self.assertIn("poly", serializer.errors)
