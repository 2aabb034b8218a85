# spectrum/services/family.py

import logging
from typing import Optional

import numpy as np
from django.conf import settings

from expansion.models import ExpansionMap
from expansion.services.transform import VectorFamilyService
from spectrum.exceptions import NoPassingK
from spectrum.models import EigenvalueCandidate, FamilyResult, Provenance
from spectrum.services.screening import ScreeningService

logger = logging.getLogger(__name__)


class FamilyService:
    """The family (rho^T)^-1 (phi^T)^(K+l) beta_j, 0 <= l < m_j, 1 <= j <= J."""

    @staticmethod
    def family_candidates(phi: ExpansionMap, rho: np.ndarray, K: int) -> list:
        dual = np.linalg.inv(np.asarray(rho, dtype=float)).T
        candidates = []
        for j, beta in enumerate(VectorFamilyService.beta_vectors(phi)):
            for l in range(phi.copies[j].m):
                gamma = dual @ np.linalg.matrix_power(phi.matrix.T, K + l) @ beta
                candidates.append(EigenvalueCandidate(
                    gamma, provenance=Provenance.CONSTRUCTED, copy=j, shift=l, K=K,
                ))
        return candidates

    @classmethod
    def construct_family(
        cls,
        phi: ExpansionMap,
        rho: np.ndarray,
        xi,
        periods,
        k_max: Optional[int] = None,
        steps: Optional[int] = None,
    ) -> FamilyResult:
        """Smallest K for which every member decays and pairs integrally with the periods."""
        k_max = settings.SPECTRUM["K_MAX"] if k_max is None else k_max
        for K in range(k_max + 1):
            members = ScreeningService.screen(phi, xi, periods, cls.family_candidates(phi, rho, K), steps)
            if all(member.accepted for member in members):
                gammas = np.array([member.candidate.gamma for member in members])
                determinant, normalized = VectorFamilyService.normalized_determinant(gammas)
                logger.info(f"Eigenvalue family passes at K={K}, det {determinant:.6g}")
                return FamilyResult(
                    K=K,
                    members=tuple(members),
                    determinant=determinant,
                    normalized_determinant=normalized,
                )
            logger.debug(f"K={K}: {sum(not m.accepted for m in members)} member(s) fail")
        raise NoPassingK(f"No K in 0..{k_max} makes the whole family decay.")
