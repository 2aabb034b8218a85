# expansion/services/fitting.py

import logging
from typing import Sequence

import numpy as np
from django.conf import settings

from expansion.exceptions import DegenerateBasis, NoBasisPoint
from expansion.models import ExpansionMap, TauFit
from expansion.services.linear import ExpansionService
from expansion.services.transform import FTransformService, VectorFamilyService

logger = logging.getLogger(__name__)


class BasisFitService:
    """
    Locating control points inside the module Z[phi]alpha_1 + ... + Z[phi]alpha_J:
    choose one point per copy near the alpha_j direction and fit the
    commuting isomorphism tau that carries their Krylov families onto those of
    the alpha_j.
    """

    @staticmethod
    def select_basis_points(phi: ExpansionMap, points: np.ndarray, origin: np.ndarray) -> np.ndarray:
        """
        Scan ``points - origin`` by increasing block norm and take, per copy, the
        first difference whose direction is within the angular tolerance of
        +alpha_j or -alpha_j and whose F-image has no small entry.
        """
        config = settings.EXPANSION
        diffs = np.asarray(points, dtype=float) - np.asarray(origin, dtype=float)
        norms = ExpansionService.block_norm(phi, diffs)
        order = np.argsort(np.atleast_1d(norms), kind="stable")

        chosen = []
        for j, alpha in enumerate(VectorFamilyService.alpha_vectors(phi)):
            target = alpha / np.linalg.norm(alpha)
            found = None
            for index in order:
                y = diffs[index]
                length = np.linalg.norm(y)
                if length == 0:
                    continue
                for sign in (1.0, -1.0):
                    if np.linalg.norm(sign * y / length - target) >= config["SELECTION_ANGLE_TOL"]:
                        continue
                    image = FTransformService.f_transform(
                        phi, ExpansionService.project(phi, sign * y, j), j
                    )
                    if np.all(np.abs(image) > config["SELECTION_MIN_F"]):
                        found = sign * y
                        break
                if found is not None:
                    break
            if found is None:
                raise NoBasisPoint(f"No control point difference near the direction of alpha_{j}.")
            chosen.append(found)

        return np.array(chosen)

    @staticmethod
    def fit_tau(phi: ExpansionMap, y_points: Sequence[np.ndarray]) -> TauFit:
        ys = np.asarray(y_points, dtype=float)
        if ys.shape != (phi.J, phi.d):
            raise DegenerateBasis(f"Expected {phi.J} points of dimension {phi.d}.")
        if not phi.homogeneous:
            # each Krylov family must stay inside its own copy to commute with phi
            ys = np.array([ExpansionService.project(phi, y, j) for j, y in enumerate(ys)])

        alphas = VectorFamilyService.alpha_vectors(phi)
        lengths = [copy.m for copy in phi.copies]
        Y = np.vstack([VectorFamilyService.krylov(phi, y, n) for y, n in zip(ys, lengths)])
        A = np.vstack([VectorFamilyService.krylov(phi, a, n) for a, n in zip(alphas, lengths)])

        _, normalized = VectorFamilyService.normalized_determinant(Y)
        if abs(normalized) <= settings.EXPANSION["DET_TOL"]:
            raise DegenerateBasis(f"Normalized determinant {normalized:.3e} of the point family.")

        tau = np.linalg.solve(Y, A).T
        residual = ExpansionService.commutator_norm(phi, tau)
        if residual > settings.EXPANSION["COMMUTE_TOL"]:
            logger.warning(f"tau commutes with phi only up to {residual:.3e}")

        return TauFit(
            tau=tau,
            basis_points=ys,
            normalized_determinant=normalized,
            commutator_residual=residual,
        )
