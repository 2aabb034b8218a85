# spectrum/services/screening.py

import logging
from itertools import combinations, product
from typing import Iterable, Optional

import numpy as np
from celery import group
from django.conf import settings

from spectrum.exceptions import InvalidSample
from spectrum.models import (
    DecayProfile,
    EigenvalueCandidate,
    EigenvalueReport,
    Provenance,
    ScreenedCandidate,
    WeakMixingReport,
)
from spectrum.services.criterion import CriterionService
from spectrum.tasks import screen_wave_vectors

logger = logging.getLogger(__name__)


class ScreeningService:
    """Decay profiles for many wave vectors, fanned out in chunks over Celery."""

    @staticmethod
    def screen(phi, xi, periods, candidates: Iterable[EigenvalueCandidate], steps: Optional[int] = None) -> list:
        candidates = list(candidates)
        if not candidates:
            return []
        steps = settings.SPECTRUM["PROFILE_LENGTH"] if steps is None else steps
        chunk = settings.SPECTRUM["SCREEN_CHUNK"]
        matrix = CriterionService.as_matrix(phi).tolist()
        xi = np.asarray(xi, dtype=float).tolist()
        periods = np.asarray(periods, dtype=float).reshape(-1, len(matrix)).tolist()
        gammas = [candidate.gamma.tolist() for candidate in candidates]

        job = group(
            screen_wave_vectors.s(matrix, xi, periods, gammas[start:start + chunk], steps)
            for start in range(0, len(gammas), chunk)
        )
        chunks = job.apply_async().get()
        profiles = [DecayProfile.from_dict(profile) for part in chunks for profile in part]
        return [ScreenedCandidate(candidate, profile) for candidate, profile in zip(candidates, profiles)]

    @staticmethod
    def parse_grid(spec: str) -> np.ndarray:
        """'lo:hi:step' to the 1-D grid lo, lo+step, ..., hi (empty string gives no points)."""
        if not spec:
            return np.zeros(0)
        try:
            lo, hi, step = (float(part) for part in spec.split(":"))
        except ValueError:
            raise InvalidSample(f"Grid {spec!r} is not of the form lo:hi:step.")
        if step <= 0 or hi < lo:
            raise InvalidSample(f"Grid {spec!r} needs lo <= hi and a positive step.")
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        # rounded so that e.g. -3 + 30 * 0.1 lands on 0 exactly
        return np.round(lo + step * np.arange(count), 12)

    @classmethod
    def grid_candidates(cls, spec: str, d: int) -> list:
        axis = cls.parse_grid(spec)
        return [
            EigenvalueCandidate(np.array(point), provenance=Provenance.GRID)
            for point in product(axis, repeat=d)
        ] if axis.size else []


class WeakMixingService:
    @staticmethod
    def weak_mixing_probe(
        phi, xi, grid_spec: str, steps: Optional[int] = None, extra=(), periods=None
    ) -> WeakMixingReport:
        """
        Screen the grid and any extra candidates. Counting decaying non-zero
        wave vectors is evidence only: zero of them is consistent with weak
        mixing, never a proof of it.
        """
        d = CriterionService.as_matrix(phi).shape[0]
        candidates = list(extra) + ScreeningService.grid_candidates(grid_spec, d)
        periods = np.zeros((0, d)) if periods is None else periods
        entries = ScreeningService.screen(phi, xi, periods, candidates, steps)
        decaying = sum(1 for entry in entries if entry.accepted and np.any(entry.candidate.gamma != 0))
        logger.info(f"{decaying} non-zero decaying wave vectors among {len(entries)}")
        return WeakMixingReport(entries=tuple(entries), decaying_nonzero=decaying)


class ReportService:
    @staticmethod
    def rank(gammas) -> int:
        gammas = np.asarray(gammas, dtype=float)
        if gammas.size == 0:
            return 0
        return int(np.linalg.matrix_rank(gammas, tol=1e-9))

    @classmethod
    def closure_violations(cls, phi, xi, periods, accepted: list, steps: Optional[int] = None) -> list:
        """Pairs (a, b) of accepted candidates whose sum does not decay."""
        limit = settings.SPECTRUM["CLOSURE_MAX_ACCEPTED"]
        nonzero = [entry for entry in accepted if np.any(entry.candidate.gamma != 0)][:limit]
        pairs = list(combinations(range(len(nonzero)), 2)) + [(k, k) for k in range(len(nonzero))]
        sums = [
            EigenvalueCandidate(nonzero[a].candidate.gamma + nonzero[b].candidate.gamma)
            for a, b in pairs
        ]
        screened = ScreeningService.screen(phi, xi, periods, sums, steps)
        return [
            (nonzero[a], nonzero[b])
            for (a, b), entry in zip(pairs, screened)
            if not entry.accepted
        ]

    @classmethod
    def eigenvalue_report(cls, phi, xi, periods, entries: list, steps: Optional[int] = None) -> EigenvalueReport:
        accepted = [entry for entry in entries if entry.accepted]
        rank = cls.rank([entry.candidate.gamma for entry in accepted])
        d = CriterionService.as_matrix(phi).shape[0]
        violations = cls.closure_violations(phi, xi, periods, accepted, steps)
        if violations:
            logger.warning(f"{len(violations)} sums of accepted wave vectors fail to decay")
        return EigenvalueReport(
            entries=tuple(entries),
            rank=rank,
            relatively_dense=rank == d,
            closure_violations=tuple(violations),
        )
