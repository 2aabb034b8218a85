# tiling/services/geometry.py

import logging
from dataclasses import replace
from typing import Optional

import numpy as np
from django.conf import settings

from expansion.services.linear import ExpansionService
from tiling.exceptions import NoSeedFound, TilingError
from tiling.models import FixedPointSeed, SubstitutionRule, TilingPatch
from tiling.services.substitution import SubstitutionService

logger = logging.getLogger(__name__)


class FixedPointService:
    """Seeds for the self-affine fixed point and their growth."""

    @staticmethod
    def search_depth(rule: SubstitutionRule) -> int:
        configured = settings.TILING["SEED_SEARCH_DEPTH"]
        if configured:
            return int(configured)
        return rule.kappa * max(len(vectors) for vectors in rule.digits.values())

    @classmethod
    def fixed_point_seed(cls, rule: SubstitutionRule, label: Optional[int] = None) -> FixedPointSeed:
        """
        Smallest power p, then first type in order, such that omega^p(T_j at 0)
        contains a type-j tile at u. The seed T_j at x = (I - phi^p)^-1 u is
        then a member of omega^p of itself. Candidate tiles are taken in
        lexicographic order of u.
        """
        labels = [label] if label is not None else range(1, rule.kappa + 1)
        phi = rule.expansion.matrix
        identity = np.eye(rule.d)

        for power in range(1, cls.search_depth(rule) + 1):
            for j in labels:
                patch = SubstitutionService.expand(rule, TilingPatch.single(j, np.zeros(rule.d)), power)
                candidates = patch.translations[patch.labels == j]
                if len(candidates) == 0:
                    continue
                u = candidates[np.lexsort(candidates.T[::-1])[0]]
                position = np.linalg.solve(identity - np.linalg.matrix_power(phi, power), u)
                logger.info(f"Seed type {j} at {position.tolist()} fixed by omega^{power}")
                return FixedPointSeed(patch=TilingPatch.single(j, position), power=power)

        raise NoSeedFound(f"No fixed tile for omega^p with p <= {cls.search_depth(rule)}.")

    @staticmethod
    def grow(rule: SubstitutionRule, seed: FixedPointSeed, target_tiles: int) -> TilingPatch:
        """
        Iterate omega^p on the seed while the next patch stays within
        ``target_tiles``; at least one step is taken.
        """
        patch = SubstitutionService.expand(rule, seed.patch, seed.power)
        while True:
            upcoming = SubstitutionService.predicted_count(
                rule, patch.census(rule.kappa), seed.power, target_tiles
            )
            if upcoming > target_tiles:
                return patch
            patch = SubstitutionService.expand(rule, patch, seed.power)

    @staticmethod
    def grow_to_radius(rule: SubstitutionRule, seed: FixedPointSeed, radius: float) -> TilingPatch:
        """Iterate omega^p until some tile lies ``radius`` beyond the seed."""
        patch = seed.patch
        reach = float(np.max(np.abs(np.vstack([tile.box for tile in rule.prototiles]))))
        while True:
            patch = SubstitutionService.expand(rule, patch, seed.power)
            spread = np.max(np.linalg.norm(patch.translations - seed.position, axis=1))
            if spread >= radius + 2 * reach:
                return patch


class ControlPointService:
    """Control points via phi(c(T)) = c(gamma T) and equal offsets per type."""

    @staticmethod
    def offsets(rule: SubstitutionRule) -> np.ndarray:
        """
        Per-type offsets x_j solving x_j = phi^-1(u_j + x_i(j)), where (i(j), u_j)
        is the designated child of type j. Iterates the contraction from 0 until
        successive iterates differ by less than the configured tolerance.
        """
        tol = settings.TILING["CONTROL_POINT_TOL"]
        max_iter = settings.TILING["CONTROL_POINT_MAX_ITER"]
        phi = rule.expansion
        designated = [rule.designated_child(j) for j in range(1, rule.kappa + 1)]
        targets = np.array([i - 1 for i, _ in designated])
        shifts = np.array([u for _, u in designated])

        x = np.zeros((rule.kappa, rule.d))
        for step in range(max_iter):
            updated = ExpansionService.apply_inverse(phi, shifts + x[targets])
            change = np.max(np.atleast_1d(ExpansionService.block_norm(phi, updated - x)))
            x = updated
            if change < tol:
                logger.debug(f"Control point offsets converged after {step + 1} iterations")
                return x
        raise TilingError(f"Control point iteration did not settle within {max_iter} steps.")

    @classmethod
    def control_points(cls, rule: SubstitutionRule, patch: TilingPatch) -> TilingPatch:
        offsets = cls.offsets(rule)
        points = patch.translations + offsets[patch.labels - 1]
        return replace(patch, control_points=points)

    @classmethod
    def seed_control_point(cls, rule: SubstitutionRule, seed: FixedPointSeed) -> np.ndarray:
        return seed.position + cls.offsets(rule)[seed.label - 1]

    @staticmethod
    def designated_children(rule: SubstitutionRule, patch: TilingPatch) -> tuple:
        """(labels, translations) of gamma T for every tile T of the patch."""
        designated = [rule.designated_child(j) for j in range(1, rule.kappa + 1)]
        labels = np.array([designated[j - 1][0] for j in patch.labels])
        shifts = np.array([designated[j - 1][1] for j in patch.labels]).reshape(len(patch), rule.d)
        return labels, ExpansionService.apply(rule.expansion, patch.translations) + shifts
