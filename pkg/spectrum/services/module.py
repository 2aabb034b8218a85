# spectrum/services/module.py

import logging
from fractions import Fraction
from math import lcm
from typing import Optional

import mpmath
import numpy as np
from django.conf import settings

from expansion.models import ExpansionMap, SpectrumBlock, TauFit
from expansion.services.transform import VectorFamilyService
from spectrum.exceptions import ReconstructionFailed
from spectrum.models import RhoFit

logger = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6
PSLQ_TOL = 1e-10
PSLQ_MAXCOEFF = 10 ** 5


class ModuleFitService:
    """
    Recovers the denominator b with b tau(C) inside Z[phi]alpha_1 + ... + Z[phi]alpha_J
    and sets rho = tau^-1 / b.
    """

    @staticmethod
    def _vandermonde(copy: SpectrumBlock, values: np.ndarray, bound: int) -> tuple:
        """Block exhausts the conjugates: solve for the coefficients and round them."""
        degree = copy.min_poly.degree
        coefficients = np.linalg.solve(np.vander(copy.eigenvalues, degree, increasing=True), values)
        residual = float(np.max(np.abs(coefficients.imag)))
        denominator = 1
        for c in coefficients.real:
            fraction = Fraction(float(c)).limit_denominator(bound)
            residual = max(residual, abs(float(c) - float(fraction)))
            denominator = lcm(denominator, fraction.denominator)
        return denominator, residual

    @staticmethod
    def _integer_relation(copy: SpectrumBlock, values: np.ndarray) -> tuple:
        """
        Block misses some conjugate: find b v = c_0 + c_1 mu + ... with mu the
        first eigenvalue of the block. Complex slots fold real and imaginary
        parts together with the weight e.
        """
        degree = copy.min_poly.degree
        mu, v = copy.eigenvalues[0], values[0]
        with mpmath.workdps(30):
            if mu.imag == 0:
                target = mpmath.mpf(v.real)
                powers = [mpmath.mpf(mu.real) ** k for k in range(degree)]
            else:
                weight = mpmath.e
                z = mpmath.mpc(mu.real, mu.imag)
                target = mpmath.mpf(v.real) + weight * mpmath.mpf(v.imag)
                powers = [(z ** k).real + weight * (z ** k).imag for k in range(degree)]
            if abs(target) < 1e-12:
                return 1, 0.0
            relation = mpmath.pslq([target] + powers, tol=PSLQ_TOL, maxcoeff=PSLQ_MAXCOEFF, maxsteps=10 ** 4)
        if relation is None or relation[0] == 0:
            return None, float("inf")

        b = abs(relation[0])
        sign = 1 if relation[0] > 0 else -1
        coefficients = [-sign * c for c in relation[1:]]
        rebuilt = sum(c * mu ** k for k, c in enumerate(coefficients))
        return b, float(abs(b * v - rebuilt)) / b

    @classmethod
    def copy_denominator(cls, copy: SpectrumBlock, values: np.ndarray, bound: int) -> tuple:
        """(b, residual) for the module values p(lambda_k) of one copy."""
        if np.all(np.abs(values) < 1e-12):
            return 1, 0.0
        if copy.m == copy.min_poly.degree:
            return cls._vandermonde(copy, values, bound)
        return cls._integer_relation(copy, values)

    @classmethod
    def fit_rho(
        cls,
        phi: ExpansionMap,
        tau_fit: TauFit,
        points,
        origin=None,
        bound: Optional[int] = None,
    ) -> RhoFit:
        bound = settings.SPECTRUM["DENOMINATOR_BOUND"] if bound is None else bound
        points = np.asarray(points, dtype=float).reshape(-1, phi.d)
        origin = np.zeros(phi.d) if origin is None else np.asarray(origin, dtype=float)
        images = (points - origin) @ tau_fit.tau.T

        denominator, worst = 1, 0.0
        for eta in images:
            for j, copy in enumerate(phi.copies):
                values = VectorFamilyService.module_values(phi, eta, j)
                b, residual = cls.copy_denominator(copy, values, bound)
                if b is None or b > bound:
                    raise ReconstructionFailed(
                        f"No denominator up to {bound} for copy {j + 1} at {eta.tolist()}; residual {residual:.3e}."
                    )
                denominator = lcm(denominator, b)
                worst = max(worst, residual)

        if denominator > bound or worst > INTEGRALITY_TOL:
            raise ReconstructionFailed(
                f"Common denominator {denominator}, worst residual {worst:.3e}."
            )

        logger.info(f"rho fitted with denominator {denominator} over {len(images)} control points")
        return RhoFit(
            rho=tau_fit.inverse / denominator,
            denominator=denominator,
            worst_residual=worst,
            sampled=len(images),
        )
