import numpy as np
from django.test import SimpleTestCase

from algebra.models import IntPolynomial
from algebra.services.arithmetic import ArithmeticService
from expansion.exceptions import (
    DegenerateBasis,
    DimensionMismatch,
    HeterogeneousMap,
    IndexOutOfRange,
    InvalidBlock,
    NotExpanding,
    NotInSingleBlock,
    ZeroCoordinate,
)
from expansion.serializers import ExpansionSerializer
from expansion.services.fitting import BasisFitService
from expansion.services.linear import ExpansionService
from expansion.services.transform import FTransformService, VectorFamilyService

GOLDEN = IntPolynomial((-1, -1, 1))
GOLDEN_VALUE = (1 + 5 ** 0.5) / 2
GAUSSIAN = IntPolynomial((2, -2, 1))
NONPISOT = IntPolynomial((-3, -1, 0, 1))


def golden_map(multiplicity=1):
    return ExpansionService.build(GOLDEN, [GOLDEN_VALUE], multiplicity=multiplicity)


def gaussian_map():
    return ExpansionService.build(GAUSSIAN, complex_pairs=[(1.0, 1.0)])


def mixed_map(multiplicity=1):
    """s=1, t=1: every root of x^3 - x - 3 lies outside the unit circle."""
    return ExpansionService.build(
        NONPISOT, [1.6717], [(-0.83585, 1.04686)], multiplicity=multiplicity
    )


class ExpansionConstructionTest(SimpleTestCase):
    """Building expansion maps from minimal polynomial data"""

    def test_eigenvalues_are_snapped(self):
        phi = mixed_map()
        self.assertEqual((phi.s, phi.t, phi.m, phi.d), (1, 1, 3, 3))
        self.assertAlmostEqual(phi.copies[0].real_eigenvalues[0] ** 3, phi.copies[0].real_eigenvalues[0] + 3, places=12)

    def test_multiplicity_sets_dimension(self):
        phi = mixed_map(2)
        self.assertEqual(phi.J, 2)
        self.assertEqual(phi.d, 6)
        self.assertTrue(phi.homogeneous)

    def test_contracting_eigenvalue_rejected(self):
        with self.assertRaises(NotExpanding):
            ExpansionService.build(GOLDEN, [1 - GOLDEN_VALUE])

    def test_non_root_rejected(self):
        with self.assertRaises(InvalidBlock):
            ExpansionService.build(GOLDEN, [1.5])

    def test_join_is_heterogeneous(self):
        phi = ExpansionService.join(golden_map(), mixed_map())
        self.assertFalse(phi.homogeneous)
        self.assertEqual(phi.d, 4)
        with self.assertRaises(HeterogeneousMap):
            phi.m

    def test_lambda_accessors(self):
        phi = mixed_map()
        self.assertAlmostEqual(phi.lambda_max, 1.6717, places=3)
        self.assertAlmostEqual(phi.lambda_min, 3 ** 0.5 / phi.lambda_max ** 0.5, places=9)


class ApplyTest(SimpleTestCase):
    """Blockwise action of phi, its transpose and inverse"""

    def test_scalar_examples(self):
        doubling = ExpansionService.build(IntPolynomial((-2, 1)), [2.0])
        np.testing.assert_allclose(ExpansionService.apply(doubling, [1.0]), [2.0])
        np.testing.assert_allclose(ExpansionService.apply(golden_map(), [1.0]), [GOLDEN_VALUE])

    def test_rotation_scaling_block(self):
        phi = ExpansionService.build(IntPolynomial((4, 0, 1)), complex_pairs=[(0.0, 2.0)])
        np.testing.assert_allclose(ExpansionService.apply(phi, [1.0, 0.0]), [0.0, 2.0], atol=1e-15)

    def test_inverse_and_transpose(self):
        phi = mixed_map(2)
        x = np.random.default_rng(3).standard_normal((50, phi.d))
        np.testing.assert_allclose(
            ExpansionService.apply_inverse(phi, ExpansionService.apply(phi, x)), x, atol=1e-12
        )
        np.testing.assert_allclose(ExpansionService.apply_transpose(phi, x), x @ phi.matrix)

    def test_inverse_polynomial_matches_blockwise_inverse(self):
        phi = mixed_map()
        np.testing.assert_allclose(
            ExpansionService.inverse_by_polynomial(phi), phi.inverse_matrix, atol=1e-12
        )

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            ExpansionService.apply(golden_map(), [1.0, 2.0])


class BlockNormTest(SimpleTestCase):
    """Max-over-sub-blocks norm"""

    def test_zero(self):
        self.assertEqual(ExpansionService.block_norm(mixed_map(), np.zeros(3)), 0.0)

    def test_direct_evaluation(self):
        self.assertEqual(ExpansionService.block_norm(mixed_map(), [3.0, 4.0, 0.0]), 4.0)

    def test_expansion_lower_bound(self):
        phi = mixed_map(2)
        x = np.random.default_rng(11).standard_normal((1000, phi.d))
        ratio = ExpansionService.block_norm(phi, ExpansionService.apply(phi, x)) / ExpansionService.block_norm(phi, x)
        self.assertTrue(np.all(ratio >= phi.lambda_min * (1 - 1e-12)))


class ProjectionTest(SimpleTestCase):
    """Projections onto the copies H_j"""

    def test_single_copy_identity(self):
        np.testing.assert_array_equal(ExpansionService.project(golden_map(), [2.5], 0), [2.5])

    def test_two_copies(self):
        phi = golden_map(2)
        np.testing.assert_array_equal(ExpansionService.project(phi, [3.0, 5.0], 0), [3.0, 0.0])

    def test_idempotent_sum_and_commuting(self):
        phi = mixed_map(2)
        x = np.random.default_rng(5).standard_normal((100, phi.d))
        parts = [ExpansionService.project(phi, x, j) for j in range(phi.J)]
        np.testing.assert_allclose(sum(parts), x)
        for j, part in enumerate(parts):
            np.testing.assert_array_equal(ExpansionService.project(phi, part, j), part)
            np.testing.assert_allclose(
                ExpansionService.project(phi, ExpansionService.apply(phi, x), j),
                ExpansionService.apply(phi, part),
                atol=1e-12,
            )

    def test_index_out_of_range(self):
        with self.assertRaises(IndexOutOfRange):
            ExpansionService.project(golden_map(), [1.0], 1)


class FTransformTest(SimpleTestCase):
    """Complex coordinates diagonalizing each copy"""

    CONFIGURATIONS = [golden_map, gaussian_map, lambda: mixed_map(2)]

    def test_real_slots_unchanged(self):
        np.testing.assert_allclose(FTransformService.f_transform(golden_map(), [2.0]), [2.0])

    def test_pair_formula(self):
        image = FTransformService.f_transform(gaussian_map(), [1.0, 0.0])
        np.testing.assert_allclose(image, [2 ** -0.5, 2 ** -0.5])

    def test_diagonalization_and_inner_product(self):
        rng = np.random.default_rng(42)
        for build in self.CONFIGURATIONS:
            phi = build()
            for j in range(phi.J):
                x = ExpansionService.project(phi, rng.standard_normal((1000, phi.d)), j)
                y = ExpansionService.project(phi, rng.standard_normal((1000, phi.d)), j)
                fx = FTransformService.f_transform(phi, x, j)
                diagonal = FTransformService.diagonal(phi, j)
                np.testing.assert_allclose(
                    FTransformService.f_transform(phi, ExpansionService.apply(phi, x), j),
                    diagonal * fx,
                    atol=1e-12,
                )
                np.testing.assert_allclose(
                    FTransformService.f_transform(phi, ExpansionService.apply_transpose(phi, x), j),
                    np.conj(diagonal) * fx,
                    atol=1e-12,
                )
                fy = FTransformService.f_transform(phi, y, j)
                np.testing.assert_allclose(
                    np.sum(fx * np.conj(fy), axis=1), np.sum(x * y, axis=1), atol=1e-12
                )
                np.testing.assert_allclose(FTransformService.f_inverse(phi, fx, j), x, atol=1e-12)

    def test_vector_in_two_copies(self):
        with self.assertRaises(NotInSingleBlock):
            FTransformService.f_transform(golden_map(2), [1.0, 1.0])


class VectorFamilyTest(SimpleTestCase):
    """alpha_j, beta_j and their Krylov families"""

    def test_alpha_patterns(self):
        np.testing.assert_array_equal(VectorFamilyService.alpha_vectors(golden_map())[0], [1.0])
        np.testing.assert_array_equal(VectorFamilyService.alpha_vectors(mixed_map())[0], [1.0, 1.0, 1.0])
        alphas = VectorFamilyService.alpha_vectors(golden_map(2))
        np.testing.assert_array_equal(alphas[0], [1.0, 0.0])
        np.testing.assert_array_equal(alphas[1], [0.0, 1.0])

    def test_beta_examples(self):
        np.testing.assert_allclose(VectorFamilyService.beta_vectors(golden_map())[0], [1.0])
        phi = mixed_map()
        beta = VectorFamilyService.beta_vectors(phi)[0]
        np.testing.assert_allclose(beta, [1.0, 1.0, 1.0], atol=1e-15)
        alpha = VectorFamilyService.alpha_vectors(phi)[0]
        np.testing.assert_allclose(
            FTransformService.f_transform(phi, beta) * np.conj(FTransformService.f_transform(phi, alpha)),
            np.ones(3),
        )

    def test_beta_scales_inversely(self):
        phi = golden_map()
        beta = VectorFamilyService.beta_vectors(phi, [np.array([2.0])])[0]
        np.testing.assert_allclose(beta, [0.5])

    def test_zero_coordinate(self):
        with self.assertRaises(ZeroCoordinate):
            VectorFamilyService.beta_vectors(mixed_map(), [np.array([1.0, 0.0, 0.0])])

    def test_power_sum_bridge(self):
        """<phi^n alpha, (phi^T)^l beta> recovers the exact power sums"""
        phi = mixed_map()
        alpha = VectorFamilyService.alpha_vectors(phi)[0]
        beta = VectorFamilyService.beta_vectors(phi)[0]
        sums = ArithmeticService.power_sums(NONPISOT, 12)
        for n in range(0, 6):
            for shift in range(1, 6):
                left = ExpansionService.apply_power(phi, alpha, n)
                right = ExpansionService.apply_power(phi, beta, shift, transpose=True)
                self.assertAlmostEqual(float(left @ right), sums[n + shift - 1], delta=1e-9 * abs(sums[n + shift - 1]) + 1e-9)

    def test_copies_are_orthogonal(self):
        phi = mixed_map(2)
        alphas = VectorFamilyService.alpha_vectors(phi)
        betas = VectorFamilyService.beta_vectors(phi)
        for n in range(4):
            self.assertAlmostEqual(float(ExpansionService.apply_power(phi, alphas[0], n) @ betas[1]), 0.0, places=12)

    def test_vandermonde_family(self):
        single = VectorFamilyService.vandermonde_family(golden_map(), [1.0])
        self.assertTrue(single.independent)
        self.assertEqual(single.vectors.shape, (1, 1))
        degenerate = VectorFamilyService.vandermonde_family(mixed_map(), [1.0, 0.0, 0.0])
        self.assertFalse(degenerate.independent)

    def test_alpha_families_form_a_basis(self):
        basis, determinant = VectorFamilyService.module_basis(mixed_map(2))
        self.assertEqual(basis.shape, (6, 6))
        self.assertGreater(abs(determinant), 1e-6)

    def test_module_values(self):
        phi = mixed_map()
        alpha = VectorFamilyService.alpha_vectors(phi)[0]
        eta = ExpansionService.apply_power(phi, alpha, 2)
        values = VectorFamilyService.module_values(phi, eta, 0)
        np.testing.assert_allclose(values, phi.eigenvalues ** 2, atol=1e-12)
        np.testing.assert_allclose(VectorFamilyService.module_coordinates(phi, eta), [0, 0, 1], atol=1e-12)


class FitTauTest(SimpleTestCase):
    """Commuting isomorphism between point families and alpha families"""

    def test_alpha_points_give_identity(self):
        phi = mixed_map(2)
        fit = BasisFitService.fit_tau(phi, VectorFamilyService.alpha_vectors(phi))
        np.testing.assert_allclose(fit.tau, np.eye(phi.d), atol=1e-12)

    def test_scaled_point(self):
        fit = BasisFitService.fit_tau(golden_map(), [np.array([3.0])])
        np.testing.assert_allclose(fit.tau, [[1 / 3]])

    def test_random_points_commute(self):
        phi = mixed_map(2)
        points = np.random.default_rng(9).standard_normal((2, phi.d))
        fit = BasisFitService.fit_tau(phi, points)
        self.assertLessEqual(fit.commutator_residual, 1e-9)
        for j, y in enumerate(points):
            np.testing.assert_allclose(
                fit.tau @ ExpansionService.apply_power(phi, y, 2),
                ExpansionService.apply_power(phi, VectorFamilyService.alpha_vectors(phi)[j], 2),
                atol=1e-9,
            )

    def test_degenerate_points(self):
        with self.assertRaises(DegenerateBasis):
            BasisFitService.fit_tau(mixed_map(), [np.array([1.0, 0.0, 0.0])])

    def test_basis_point_selection(self):
        phi = golden_map(2)
        points = np.array([[0.0, 0.0], [0.3, 2.0], [-1.0, 0.05], [0.05, 1.0], [5.0, 0.0]])
        chosen = BasisFitService.select_basis_points(phi, points, points[0])
        np.testing.assert_allclose(chosen, [[1.0, -0.05], [0.05, 1.0]])


class ExpansionSerializerTest(SimpleTestCase):
    """JSON form of the expansion map"""

    def test_homogeneous_roundtrip(self):
        serializer = ExpansionSerializer(
            data={"min_poly": ["-1", "-1", "1"], "real_blocks": [1.618033988749895], "multiplicity": 2}
        )
        self.assertTrue(serializer.is_valid(), serializer.errors)
        phi = serializer.save()
        self.assertEqual(phi.J, 2)
        self.assertEqual(ExpansionSerializer(phi).data["multiplicity"], 2)

    def test_bad_eigenvalue_reported(self):
        serializer = ExpansionSerializer(data={"min_poly": ["-1", "-1", "1"], "real_blocks": [1.5]})
        self.assertFalse(serializer.is_valid())
