# cli/services/pipeline.py

import logging
from contextlib import contextmanager
from typing import Optional

import numpy as np
from django.conf import settings

from algebra.exceptions import ComputationError
from algebra.models import Verdict
from algebra.services.classification import PisotClassificationService
from cli.models import GapTrend, GapVerdict, SpectrumRun
from expansion.services.fitting import BasisFitService
from spectrum.exceptions import NotPisotFamily
from spectrum.services.criterion import CriterionService
from spectrum.services.family import FamilyService
from spectrum.services.module import ModuleFitService
from spectrum.services.screening import ReportService, WeakMixingService
from tiling.exceptions import WindowTooSmall
from tiling.models import SubstitutionRule
from tiling.services.geometry import ControlPointService, FixedPointService
from tiling.services.local import LocalStructureService

logger = logging.getLogger(__name__)

STABLE_RATIO = 0.9
SHRINK_RATIO = 0.5


class SpectrumPipeline:
    """
    expand -> control points -> return vectors -> periods -> tau -> rho ->
    family -> probe -> report. A failing stage is recorded and the stages
    that depend on it are skipped; the run itself never raises.
    """

    def __init__(
        self,
        rule: SubstitutionRule,
        seed_tile: Optional[int] = None,
        steps: Optional[int] = None,
        grid: Optional[str] = None,
        k_max: Optional[int] = None,
    ):
        config = settings.SPECTRUM
        self.rule = rule
        self.phi = rule.expansion
        self.seed_tile = seed_tile
        self.steps = config["PROFILE_LENGTH"] if steps is None else steps
        self.grid = config["GRID"] if grid is None else grid
        self.k_max = config["K_MAX"] if k_max is None else k_max

    @staticmethod
    @contextmanager
    def stage(run: SpectrumRun, name: str):
        try:
            yield
        except ComputationError as exc:
            logger.warning(f"Stage {name} failed: {exc.detail}")
            run.errors.append({"stage": name, **exc.as_record()})
        except np.linalg.LinAlgError as exc:
            logger.warning(f"Stage {name} failed: {exc}")
            run.errors.append({"stage": name, "code": "linalg_error", "detail": str(exc)})
        else:
            run.completed.append(name)

    @staticmethod
    def sample_window(points: np.ndarray) -> tuple:
        """Largest ball centred in the bounding box of the control points."""
        lower, upper = points.min(axis=0), points.max(axis=0)
        return float(np.min(upper - lower)) / 2, (lower + upper) / 2

    @staticmethod
    def cap_vectors(vectors: np.ndarray) -> np.ndarray:
        cap = settings.SPECTRUM["XI_CAP"]
        if len(vectors) <= cap:
            return vectors
        order = np.argsort(np.linalg.norm(vectors, axis=1), kind="stable")
        logger.info(f"Return vectors capped from {len(vectors)} to {cap}")
        return vectors[np.sort(order[:cap])]

    @staticmethod
    def nearest(points: np.ndarray, origin: np.ndarray, count: int) -> np.ndarray:
        order = np.argsort(np.linalg.norm(points - origin, axis=1), kind="stable")
        return points[order[:count]]

    def run(self) -> SpectrumRun:
        run = SpectrumRun(rule=self.rule)
        rule, phi = self.rule, self.phi

        with self.stage(run, "expand"):
            run.seed = FixedPointService.fixed_point_seed(rule, self.seed_tile)
            patch = FixedPointService.grow(rule, run.seed, settings.SPECTRUM["PATCH_TILES"])
        if "expand" not in run.completed:
            return self.finish(run)

        with self.stage(run, "control_points"):
            run.patch = ControlPointService.control_points(rule, patch)
            run.origin = ControlPointService.seed_control_point(rule, run.seed)
        if run.patch is None:
            return self.finish(run)
        points = run.patch.control_points
        window, center = self.sample_window(points)

        with self.stage(run, "return_vectors"):
            xi = LocalStructureService.return_vectors(run.patch, window, center).vectors
            run.xi = self.cap_vectors(xi)
        with self.stage(run, "periods"):
            run.periods = LocalStructureService.periods(run.patch, window, center)
        if run.xi is None:
            return self.finish(run)
        periods = run.periods if run.periods is not None else np.zeros((0, rule.d))

        with self.stage(run, "tau"):
            chosen = BasisFitService.select_basis_points(phi, points, run.origin)
            run.tau_fit = BasisFitService.fit_tau(phi, chosen)
        if run.tau_fit is not None:
            with self.stage(run, "rho"):
                sample = self.nearest(points, run.origin, settings.SPECTRUM["RHO_SAMPLE"])
                run.rho_fit = ModuleFitService.fit_rho(phi, run.tau_fit, sample, run.origin)
            run.rho = run.rho_fit.rho if run.rho_fit is not None else run.tau_fit.inverse

        if run.rho is not None:
            with self.stage(run, "family"):
                run.family = FamilyService.construct_family(phi, run.rho, run.xi, periods, self.k_max, self.steps)

        with self.stage(run, "probe"):
            extra = [member.candidate for member in run.family.members] if run.family else []
            run.probe = WeakMixingService.weak_mixing_probe(phi, run.xi, self.grid, self.steps, extra, periods)
        if run.probe is not None:
            with self.stage(run, "report"):
                run.report = ReportService.eigenvalue_report(phi, run.xi, periods, list(run.probe.entries), self.steps)

        return self.finish(run)

    @staticmethod
    def copy_groups(phi) -> list:
        """Distinct copies of the expansion with the indices of the copies equal to them."""
        groups = []
        for j, copy in enumerate(phi.copies):
            for block, members in groups:
                if block == copy:
                    members.append(j)
                    break
            else:
                groups.append((copy, [j]))
        return groups

    @staticmethod
    def combine(verdicts: list) -> str:
        if Verdict.NO in verdicts:
            return Verdict.NO.value
        if Verdict.UNDECIDABLE in verdicts:
            return Verdict.UNDECIDABLE.value
        return Verdict.YES.value

    def finish(self, run: SpectrumRun) -> SpectrumRun:
        phi = self.phi
        groups = self.copy_groups(phi)
        verdicts, condition = [], True
        for block, members in groups:
            verdicts.append(PisotClassificationService.is_pisot_family(block.selection))
            condition &= PisotClassificationService.multiplicity_condition(
                block.selection.roots, {i: len(members) for i in block.selection.selected}
            )
        pisot = self.combine(verdicts)

        accepted = [entry.candidate.gamma for entry in run.report.accepted] if run.report else []
        run.axes = [
            {
                "copy": j + 1,
                "dimension": copy.m,
                "pisot_family": PisotClassificationService.is_pisot_family(copy.selection).value,
                "rank": ReportService.rank([gamma[phi.copy_slice(j)] for gamma in accepted]),
            }
            for j, copy in enumerate(phi.copies)
        ]

        dense = run.report.relatively_dense if run.report else None
        evidence = None
        if run.probe is not None:
            evidence = "consistent" if run.probe.consistent_with_weak_mixing else "absent"
        hypothesis = len(groups) == 1
        consistent = None
        if hypothesis and dense is not None and evidence is not None:
            consistent = (pisot == Verdict.YES) == dense == (evidence == "absent")

        run.banner = {
            "pisot_family": pisot,
            "relatively_dense": dense,
            "weak_mixing_evidence": evidence,
            "hypothesis_holds": hypothesis,
            "expansion_condition": bool(condition),
            "equivalence_consistent": consistent,
        }
        logger.info(f"{self.rule.name}: banner {run.banner}")
        return run

    def decay_bounds(self, member) -> Optional[np.ndarray]:
        """Conjugate bound per n for a constructed family member, None off Pisot copies."""
        selection = self.phi.copies[member.candidate.copy].selection
        try:
            return np.array([
                CriterionService.pisot_decay_bound(selection, n) for n in range(len(member.profile.eps))
            ])
        except NotPisotFamily:
            return None


class MeyerTrendService:
    """Smallest gap of C - C inside growing windows around the seed's control point."""

    @staticmethod
    def trend(gaps: list) -> str:
        found = [gap for gap in gaps if gap is not None]
        if len(found) < 2:
            return GapVerdict.INCONCLUSIVE.value
        if min(found) >= STABLE_RATIO * max(found):
            return GapVerdict.STABLE.value
        if found[-1] <= SHRINK_RATIO * found[0]:
            return GapVerdict.SHRINKING.value
        return GapVerdict.INCONCLUSIVE.value

    @classmethod
    def gap_trend(cls, rule: SubstitutionRule, windows, seed_tile: Optional[int] = None) -> GapTrend:
        windows = sorted(float(w) for w in windows)
        seed = FixedPointService.fixed_point_seed(rule, seed_tile)
        patch = ControlPointService.control_points(
            rule, FixedPointService.grow_to_radius(rule, seed, windows[-1])
        )
        center = ControlPointService.seed_control_point(rule, seed)

        gaps, errors = [], []
        for window in windows:
            try:
                gaps.append(LocalStructureService.meyer_gap(patch.control_points, window, center))
            except WindowTooSmall as exc:
                gaps.append(None)
                errors.append({"window": window, **exc.as_record()})

        verdict = cls.trend(gaps)
        logger.info(f"{rule.name}: Meyer gaps {gaps} -> {verdict}")
        return GapTrend(
            windows=tuple(windows),
            gaps=tuple(gaps),
            errors=tuple(errors),
            trend=verdict,
            center=tuple(center.tolist()),
        )
