# algebra/services/roots.py

import logging
import math
from typing import Optional

import mpmath
import numpy as np
from django.conf import settings

from algebra.exceptions import CertificationFailed, InvalidPolynomial
from algebra.models import CertifiedRoot, IntPolynomial, RootSet
from algebra.services.arithmetic import ArithmeticService

logger = logging.getLogger(__name__)


class RootIsolationService:
    """
    Certified isolation of the complex roots of a monic squarefree integer
    polynomial.

    Estimates come from the companion matrix (numpy), are polished by Newton's
    method in mpmath, and each polished value z gets the inclusion disk
    |w - z| <= deg * |p(z) / p'(z)|, which always contains a root. When the
    deg disks are pairwise disjoint each holds exactly one root. Disks that
    reach the real axis are recentred on it; a disk symmetric about the axis
    holding a single root holds a real one.
    """

    NEWTON_STEPS = 80

    @classmethod
    def isolate_roots(cls, poly: IntPolynomial, precision: Optional[float] = None) -> RootSet:
        poly.require_monic()
        if poly.degree < 1:
            raise InvalidPolynomial("Root isolation needs degree at least 1.")
        ArithmeticService.require_squarefree(poly)

        config = settings.ALGEBRA
        precision = precision or config["ROOT_PRECISION"]
        dps = config["WORK_DPS"]

        while dps <= config["MAX_DPS"]:
            with mpmath.workdps(dps):
                for estimator in (cls._companion_estimates, cls._polyroots_estimates):
                    estimates = estimator(poly)
                    if estimates is None:
                        continue
                    root_set = cls._certify(poly, estimates, precision)
                    if root_set is not None:
                        return root_set
            logger.info(f"Root certification for {poly} failed at {dps} digits, retrying")
            dps *= 2

        raise CertificationFailed(f"No certified isolation for {poly} within {config['MAX_DPS']} digits.")

    @staticmethod
    def _companion_estimates(poly: IntPolynomial) -> Optional[list]:
        if poly.degree == 1:
            return [mpmath.mpc(-poly.coeffs[0])]
        try:
            approx = np.roots(np.array(poly.high_first(), dtype=float))
        except (np.linalg.LinAlgError, OverflowError):
            return None
        return [mpmath.mpc(complex(z)) for z in approx]

    @staticmethod
    def _polyroots_estimates(poly: IntPolynomial) -> Optional[list]:
        try:
            found = mpmath.polyroots(poly.high_first(), maxsteps=200, extraprec=2 * mpmath.mp.prec)
        except mpmath.NoConvergence:
            return None
        return [mpmath.mpc(z) for z in found]

    @classmethod
    def _newton(cls, coeffs: list, z):
        tiny = mpmath.mpf(2) ** (8 - mpmath.mp.prec)
        for _ in range(cls.NEWTON_STEPS):
            value, slope = mpmath.polyval(coeffs, z, derivative=True)
            if slope == 0:
                return None
            step = value / slope
            z -= step
            if abs(step) <= tiny * max(abs(z), 1):
                break
        return z

    @staticmethod
    def _inclusion_radius(coeffs: list, degree: int, z):
        value, slope = mpmath.polyval(coeffs, z, derivative=True)
        if slope == 0:
            return None
        return degree * abs(value / slope)

    @staticmethod
    def _outward(value) -> float:
        return math.nextafter(float(value), math.inf)

    @classmethod
    def _certify(cls, poly: IntPolynomial, estimates: list, precision: float) -> Optional[RootSet]:
        coeffs = poly.high_first()
        degree = poly.degree
        reals, uppers = [], []

        for estimate in estimates:
            z = cls._newton(coeffs, estimate)
            if z is None:
                return None
            radius = cls._inclusion_radius(coeffs, degree, z)
            if radius is None:
                return None

            if abs(z.imag) <= radius:
                x = cls._newton(coeffs, mpmath.mpf(z.real))
                if x is None:
                    return None
                x = mpmath.mpf(mpmath.re(x))
                radius = cls._inclusion_radius(coeffs, degree, x)
                if radius is None:
                    return None
                center = float(x)
                radius = cls._outward(radius + abs(x - center))
                reals.append(CertifiedRoot(value=complex(center, 0.0), radius=radius))
            elif z.imag > 0:
                center = complex(z)
                radius = cls._outward(radius + abs(z - mpmath.mpc(center)))
                uppers.append(CertifiedRoot(value=center, radius=radius))

        if len(reals) + 2 * len(uppers) != degree:
            return None

        roots = reals + uppers + [
            CertifiedRoot(value=root.value.conjugate(), radius=root.radius) for root in uppers
        ]
        if any(root.radius > precision for root in roots):
            return None

        for i in range(degree):
            for j in range(i + 1, degree):
                if abs(roots[i].value - roots[j].value) <= roots[i].radius + roots[j].radius:
                    return None

        roots.sort(key=lambda root: (-root.modulus, -root.value.imag, -root.value.real))
        pairing = []
        for root in roots:
            if root.is_real:
                pairing.append(len(pairing))
                continue
            mirror = root.value.conjugate()
            pairing.append(next(k for k, other in enumerate(roots) if other.value == mirror))

        return RootSet(poly=poly, roots=tuple(roots), pairing=tuple(pairing))
