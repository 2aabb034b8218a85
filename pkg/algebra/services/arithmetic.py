# algebra/services/arithmetic.py

import math

import numpy as np

from algebra.exceptions import (
    NonFinite,
    NotInvertible,
    NotIrreducible,
    NotSquarefree,
)
from algebra.models import IntPolynomial, RationalPolynomial


class ArithmeticService:
    """
    Exact arithmetic over Z[x] and Q[x]: gcds, inverses in Q[x]/(p), Newton
    power sums. Nothing here touches floating point except the distance helpers.
    """

    @staticmethod
    def polynomial_gcd(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
        """Monic gcd by the Euclidean algorithm over Q."""
        while not b.is_zero:
            a, b = b, a % b
        return a.monic()

    @classmethod
    def require_squarefree(cls, poly: IntPolynomial) -> IntPolynomial:
        rational = poly.as_rational()
        common = cls.polynomial_gcd(rational, rational.derivative())
        if common.degree > 0:
            raise NotSquarefree(
                f"gcd(p, p') has degree {common.degree} for p = {poly}."
            )
        return poly

    @staticmethod
    def power_sums(poly: IntPolynomial, n_max: int) -> list:
        """
        p_1 .. p_{n_max}, the sums of n-th powers of all roots, by Newton's
        identities over the integers.
        """
        poly.require_monic()
        if n_max < 1:
            raise ValueError("n_max must be at least 1")

        degree = poly.degree
        # a[i] is the coefficient of x^(degree - i)
        a = [poly.coeffs[degree - i] for i in range(degree + 1)]
        sums = [degree]
        for k in range(1, n_max + 1):
            total = 0
            for i in range(1, min(k - 1, degree) + 1):
                total += a[i] * sums[k - i]
            if k <= degree:
                total += k * a[k]
            sums.append(-total)
        return sums[1:]

    @classmethod
    def field_inverse(cls, q: RationalPolynomial, p: IntPolynomial) -> RationalPolynomial:
        """
        h with q*h = 1 mod p and deg h < deg p, by the extended Euclidean
        algorithm. A non-constant gcd with p is a witness that p is reducible.
        """
        p.require_monic()
        modulus = p.as_rational()
        reduced = q % modulus
        if reduced.is_zero:
            raise NotInvertible(f"The element reduces to zero modulo {p}.")

        r0, r1 = modulus, reduced
        s0, s1 = RationalPolynomial.zero(), RationalPolynomial.one()
        while not r1.is_zero:
            quotient, remainder = divmod(r0, r1)
            r0, r1 = r1, remainder
            s0, s1 = s1, s0 - quotient * s1

        if r0.degree > 0:
            raise NotIrreducible(
                f"{p} has a factor of degree {r0.degree} in common with the element."
            )

        inverse = (s0 * (1 / r0.leading)) % modulus
        check = (reduced * inverse - RationalPolynomial.one()) % modulus
        if not check.is_zero:
            raise NotInvertible("Inverse failed exact verification.")
        return inverse

    @staticmethod
    def dist_to_integers(x: float) -> float:
        if not math.isfinite(x):
            raise NonFinite(f"dist_to_integers received {x}.")
        return abs(x - round(x))

    @staticmethod
    def dist_to_integers_array(values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise NonFinite("dist_to_integers received a non-finite entry.")
        return np.abs(values - np.rint(values))
