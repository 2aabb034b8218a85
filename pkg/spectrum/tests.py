import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from algebra.models import IntPolynomial, SpectrumSelection
from algebra.services.roots import RootIsolationService
from expansion.models import TauFit
from expansion.services.linear import ExpansionService
from spectrum.exceptions import InvalidSample, NoPassingK, NotPisotFamily, ReconstructionFailed
from spectrum.models import (
    DecayProfile,
    EigenvalueCandidate,
    ProfileVerdict,
    Provenance,
    ScreenedCandidate,
)
from spectrum.services.criterion import CriterionService
from spectrum.services.family import FamilyService
from spectrum.services.module import ModuleFitService
from spectrum.services.screening import ReportService, ScreeningService, WeakMixingService
from spectrum.tasks import screen_wave_vectors
from tiling.models import TilingPatch
from tiling.services.geometry import ControlPointService, FixedPointService
from tiling.services.loader import RuleLoader
from tiling.services.local import LocalStructureService
from tiling.services.substitution import SubstitutionService

PHI = (1 + 5 ** 0.5) / 2
GOLDEN = IntPolynomial((-1, -1, 1))
DOUBLING = np.array([[2.0]])
INTEGERS = np.arange(-5, 6, dtype=float).reshape(-1, 1)


def return_sample(fixture, k, window):
    rule = RuleLoader.load_fixture(fixture)
    patch = SubstitutionService.expand(rule, TilingPatch.single(1, np.zeros(rule.d)), k)
    patch = ControlPointService.control_points(rule, patch)
    return rule, LocalStructureService.return_vectors(patch, window=window).vectors


def accepted(gamma):
    profile = DecayProfile(eps=np.zeros(9), fitted_rate=0.0, verdict=ProfileVerdict.DECAYS)
    return ScreenedCandidate(EigenvalueCandidate(np.array([gamma])), profile)


def identity_fit(d):
    return TauFit(tau=np.eye(d), basis_points=np.eye(d), normalized_determinant=1.0, commutator_residual=0.0)


class CriterionProfileTest(SimpleTestCase):
    """Tests for decay profiles of single wave vectors"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.rule, cls.xi = return_sample("fib.json", 10, 20.0)

    def test_fibonacci_unit_decays(self):
        profile = CriterionService.criterion_profile(self.rule.expansion, self.xi, [], [1.0])
        self.assertEqual(profile.verdict, ProfileVerdict.DECAYS)
        self.assertAlmostEqual(profile.fitted_rate, 1 / PHI, delta=0.05)
        self.assertEqual(profile.length, settings.SPECTRUM["PROFILE_LENGTH"])
        self.assertLess(profile.eps[-1], 1e-3)
        self.assertFalse(profile.high_precision)

    def test_fibonacci_half_stalls(self):
        profile = CriterionService.criterion_profile(self.rule.expansion, self.xi, [], [0.5])
        self.assertEqual(profile.verdict, ProfileVerdict.STALLS)

    @override_settings(SPECTRUM={**settings.SPECTRUM, "HIGH_PRECISION_TRIGGER": 1.0})
    def test_high_precision_agrees_with_doubles(self):
        precise = CriterionService.criterion_profile(self.rule.expansion, self.xi, [], [1.0])
        self.assertTrue(precise.high_precision)
        with self.settings(SPECTRUM={**settings.SPECTRUM, "HIGH_PRECISION_TRIGGER": float("inf")}):
            plain = CriterionService.criterion_profile(self.rule.expansion, self.xi, [], [1.0])
        self.assertFalse(plain.high_precision)
        np.testing.assert_allclose(precise.eps, plain.eps, atol=1e-7)

    def test_dyadic_wave_vectors_of_doubling(self):
        for gamma in (1.0, 0.5, 0.25, 0.0):
            profile = CriterionService.criterion_profile(DOUBLING, INTEGERS, [], [gamma])
            self.assertEqual(profile.verdict, ProfileVerdict.DECAYS, gamma)
        third = CriterionService.criterion_profile(DOUBLING, INTEGERS, [], [1 / 3])
        self.assertEqual(third.verdict, ProfileVerdict.STALLS)

    def test_periods_must_pair_integrally(self):
        profile = CriterionService.criterion_profile(DOUBLING, INTEGERS, [[1.0]], [0.5])
        self.assertFalse(profile.periods_ok)
        self.assertEqual(profile.verdict, ProfileVerdict.STALLS)
        profile = CriterionService.criterion_profile(DOUBLING, INTEGERS, [[1.0]], [1.0])
        self.assertTrue(profile.periods_ok)
        self.assertEqual(profile.verdict, ProfileVerdict.DECAYS)

    def test_integer_shift_leaves_profile_unchanged(self):
        low = CriterionService.criterion_profile(DOUBLING, INTEGERS, [], [0.3])
        high = CriterionService.criterion_profile(DOUBLING, INTEGERS, [], [1.3])
        np.testing.assert_allclose(low.eps, high.eps, atol=1e-6)
        self.assertEqual(low.verdict, high.verdict)

    def test_module_shift_moves_profile_by_its_own_decay(self):
        phi = self.rule.expansion
        shift = CriterionService.criterion_profile(phi, self.xi, [], [PHI])
        base = CriterionService.criterion_profile(phi, self.xi, [], [0.5])
        moved = CriterionService.criterion_profile(phi, self.xi, [], [0.5 + PHI])
        self.assertEqual(shift.verdict, ProfileVerdict.DECAYS)
        np.testing.assert_array_less(np.abs(moved.eps - base.eps), shift.eps + 1e-8)
        self.assertEqual(moved.verdict, base.verdict)

    @override_settings(SPECTRUM={**settings.SPECTRUM, "HIGH_PRECISION_TRIGGER": float("inf")})
    def test_truncates_past_double_range(self):
        profile = CriterionService.criterion_profile(DOUBLING, [[0.0], [1.0]], [], [1e-3], steps=70)
        self.assertEqual(profile.truncated_at, 63)
        self.assertEqual(len(profile.eps), 63)

    def test_invalid_samples(self):
        with self.assertRaises(InvalidSample):
            CriterionService.criterion_profile(DOUBLING, INTEGERS, [], [1.0], steps=5)
        with self.assertRaises(InvalidSample):
            CriterionService.criterion_profile(DOUBLING, [[1.0], [2.0]], [], [1.0])
        with self.assertRaises(InvalidSample):
            CriterionService.criterion_profile(DOUBLING, INTEGERS, [], [1.0, 2.0])
        with self.assertRaises(InvalidSample):
            EigenvalueCandidate([np.nan])

    def test_classify_short_profile_is_inconclusive(self):
        _, verdict = CriterionService.classify(np.zeros(5))
        self.assertEqual(verdict, ProfileVerdict.INCONCLUSIVE)


class DecayBoundTest(SimpleTestCase):
    """Tests for the conjugate decay bound of Pisot families"""

    def test_golden_bound(self):
        roots = RootIsolationService.isolate_roots(GOLDEN)
        selection = SpectrumSelection.from_values(roots, [PHI])
        self.assertAlmostEqual(CriterionService.pisot_decay_bound(selection, 20), PHI ** -20, places=12)
        self.assertAlmostEqual(CriterionService.pisot_decay_bound(selection, 0), 1.0)

    def test_non_pisot_selection_rejected(self):
        poly = IntPolynomial((-3, -1, 0, 1))
        roots = RootIsolationService.isolate_roots(poly)
        lam = float(np.max(np.roots([1, 0, -1, -3]).real))
        selection = SpectrumSelection.from_values(roots, [lam])
        with self.assertRaises(NotPisotFamily):
            CriterionService.pisot_decay_bound(selection, 10)

    def test_module_profile_stays_within_bound(self):
        phi = RuleLoader.load_fixture("fib.json").expansion
        coefficients = range(-3, 4)
        xi = [[a + b * PHI] for a in coefficients for b in coefficients]
        largest = max(abs(c) for c in coefficients)
        profile = CriterionService.criterion_profile(phi, xi, [], [1.0])
        selection = phi.copies[0].selection
        self.assertEqual(len(profile.eps), settings.SPECTRUM["PROFILE_LENGTH"] + 1)
        for n, eps in enumerate(profile.eps):
            self.assertLessEqual(eps, 10 * CriterionService.pisot_decay_bound(selection, n) * largest, n)


class ScreeningTest(SimpleTestCase):
    """Tests for chunked screening, grids and the weak-mixing probe"""

    @override_settings(SPECTRUM={**settings.SPECTRUM, "SCREEN_CHUNK": 2})
    def test_results_keep_input_order(self):
        gammas = [1.0, 1 / 3, 0.25, 0.0, 0.5]
        candidates = [EigenvalueCandidate([g]) for g in gammas]
        screened = ScreeningService.screen(DOUBLING, INTEGERS, [], candidates)
        self.assertEqual([s.candidate for s in screened], candidates)
        self.assertEqual([s.accepted for s in screened], [True, False, True, True, True])

    def test_empty_screen(self):
        self.assertEqual(ScreeningService.screen(DOUBLING, INTEGERS, [], []), [])

    def test_task_returns_plain_profiles(self):
        profiles = screen_wave_vectors(DOUBLING.tolist(), INTEGERS.tolist(), [], [[1.0], [1 / 3]], 12)
        self.assertEqual([p["verdict"] for p in profiles], ["decays", "stalls"])
        self.assertEqual(len(profiles[0]["eps"]), 13)

    def test_parse_grid(self):
        grid = ScreeningService.parse_grid("-2:2:0.25")
        self.assertEqual(len(grid), 17)
        self.assertAlmostEqual(grid[-1], 2.0)
        self.assertEqual(ScreeningService.parse_grid("").size, 0)
        tenths = ScreeningService.parse_grid("-3:3:0.1")
        self.assertEqual(len(tenths), 61)
        self.assertEqual(tenths[30], 0.0)
        for bad in ("1:2", "a:b:c", "1:0:1", "0:1:0"):
            with self.assertRaises(InvalidSample):
                ScreeningService.parse_grid(bad)

    def test_grid_candidates(self):
        candidates = ScreeningService.grid_candidates("0:1:0.5", 2)
        self.assertEqual(len(candidates), 9)
        self.assertTrue(all(c.provenance == Provenance.GRID for c in candidates))
        self.assertEqual(ScreeningService.grid_candidates("", 2), [])

    def test_fibonacci_probe_finds_integers(self):
        rule, xi = return_sample("fib.json", 10, 20.0)
        report = WeakMixingService.weak_mixing_probe(rule.expansion, xi, "-2:2:0.25")
        found = sorted(float(e.candidate.gamma[0]) for e in report.entries if e.accepted)
        self.assertEqual(found, [-2.0, -1.0, 0.0, 1.0, 2.0])
        self.assertEqual(report.decaying_nonzero, 4)
        self.assertFalse(report.consistent_with_weak_mixing)


class EigenvalueReportTest(SimpleTestCase):
    """Tests for rank, relative density and closure under addition"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.rule, cls.xi = return_sample("fib.json", 10, 20.0)

    def test_rank(self):
        self.assertEqual(ReportService.rank([]), 0)
        self.assertEqual(ReportService.rank([[1.0, 2.0], [2.0, 4.0]]), 1)
        self.assertEqual(ReportService.rank([[1.0, 0.0], [0.0, PHI]]), 2)

    def test_fibonacci_report(self):
        candidates = ScreeningService.grid_candidates("-2:2:0.5", 1)
        entries = ScreeningService.screen(self.rule.expansion, self.xi, [], candidates)
        report = ReportService.eigenvalue_report(self.rule.expansion, self.xi, [], entries)
        self.assertEqual(report.rank, 1)
        self.assertTrue(report.relatively_dense)
        self.assertEqual(report.closure_violations, ())
        self.assertEqual(len(report.accepted), 5)

    def test_closure_violations(self):
        violations = ReportService.closure_violations(
            self.rule.expansion, self.xi, [], [accepted(0.5), accepted(0.25)]
        )
        pairs = sorted((float(a.candidate.gamma[0]), float(b.candidate.gamma[0])) for a, b in violations)
        self.assertEqual(pairs, [(0.25, 0.25), (0.5, 0.25)])


class FamilyTest(SimpleTestCase):
    """Tests for the constructed eigenvalue family"""

    def test_candidates_scale_with_rho(self):
        phi = ExpansionService.build(GOLDEN, [PHI])
        for K in range(3):
            (candidate,) = FamilyService.family_candidates(phi, 2 * np.eye(1), K)
            self.assertAlmostEqual(candidate.gamma[0], PHI ** K / 2)
            self.assertEqual((candidate.copy, candidate.shift, candidate.K), (0, 0, K))
            self.assertEqual(candidate.provenance, Provenance.CONSTRUCTED)

    def test_candidates_cover_every_copy_and_shift(self):
        phi = ExpansionService.build(IntPolynomial((4, 0, 1)), complex_pairs=[(0.0, 2.0)], multiplicity=2)
        candidates = FamilyService.family_candidates(phi, np.eye(phi.d), 1)
        self.assertEqual([(c.copy, c.shift) for c in candidates], [(0, 0), (0, 1), (1, 0), (1, 1)])

    def test_fibonacci_family_passes_at_zero(self):
        rule, xi = return_sample("fib.json", 10, 20.0)
        result = FamilyService.construct_family(rule.expansion, np.eye(1), xi, [], k_max=3)
        self.assertEqual(result.K, 0)
        np.testing.assert_allclose(result.gammas, [[1.0]])
        self.assertAlmostEqual(result.determinant, 1.0)

    def test_non_pisot_family_never_passes(self):
        rule = RuleLoader.load_fixture("nonpisot1d.json")
        seed = FixedPointService.fixed_point_seed(rule)
        patch = FixedPointService.grow(rule, seed, 600)
        patch = ControlPointService.control_points(rule, patch)
        xi = LocalStructureService.return_vectors(patch, window=10.0).vectors
        with self.assertRaises(NoPassingK):
            FamilyService.construct_family(rule.expansion, np.eye(1), xi, [], k_max=2, steps=20)


class RhoFitTest(SimpleTestCase):
    """Tests for the denominator of control-point module coordinates"""

    def setUp(self):
        self.phi = ExpansionService.build(GOLDEN, [PHI])

    def test_integral_points(self):
        points = np.array([[0.0], [1.0], [PHI], [2 + 3 * PHI], [-1 - PHI]])
        fit = ModuleFitService.fit_rho(self.phi, identity_fit(1), points)
        self.assertEqual(fit.denominator, 1)
        np.testing.assert_allclose(fit.rho, np.eye(1))
        self.assertEqual(fit.sampled, 5)

    def test_common_denominator(self):
        points = np.array([[1.0], [PHI], [2 + PHI]]) / 3
        fit = ModuleFitService.fit_rho(self.phi, identity_fit(1), points, origin=[0.0])
        self.assertEqual(fit.denominator, 3)
        np.testing.assert_allclose(fit.rho, np.eye(1) / 3)
        self.assertLess(fit.worst_residual, 1e-9)

    def test_origin_is_subtracted(self):
        points = np.array([[0.5], [1.5], [0.5 + PHI]])
        fit = ModuleFitService.fit_rho(self.phi, identity_fit(1), points, origin=[0.5])
        self.assertEqual(fit.denominator, 1)

    def test_transcendental_point_fails(self):
        points = np.array([[1.0], [np.pi]])
        with self.assertRaises(ReconstructionFailed):
            ModuleFitService.fit_rho(self.phi, identity_fit(1), points, bound=10)

    def test_full_block_uses_both_conjugates(self):
        root = 3 ** 0.5
        phi = ExpansionService.build(IntPolynomial((-3, 0, 1)), [root, -root])
        points = np.array([[1 + root, 1 - root], [2.0, 2.0]]) / 2
        fit = ModuleFitService.fit_rho(phi, identity_fit(2), points)
        self.assertEqual(fit.denominator, 2)
