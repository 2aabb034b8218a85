# algebra/models.py

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from django.db import models

from algebra.exceptions import InvalidPolynomial, InvalidSelection, NonMonic


class Verdict(models.TextChoices):
    YES = "yes", "Yes"
    NO = "no", "No"
    UNDECIDABLE = "undecidable", "Undecidable"


@dataclass(frozen=True)
class RationalPolynomial:
    """
    Polynomial over Q with coefficients lowest degree first.
    Trailing zeros are stripped on construction; the empty tuple is the zero
    polynomial (degree -1).
    """

    coeffs: tuple

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def zero(cls) -> "RationalPolynomial":
        return cls(())

    @classmethod
    def one(cls) -> "RationalPolynomial":
        return cls((1,))

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "RationalPolynomial":
        return cls((0,) * degree + (coeff,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (size - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (size - len(other.coeffs))
        return RationalPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "RationalPolynomial":
        if not isinstance(other, RationalPolynomial):
            return RationalPolynomial(tuple(c * Fraction(other) for c in self.coeffs))
        if self.is_zero or other.is_zero:
            return RationalPolynomial.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(tuple(out))

    __rmul__ = __mul__

    def __divmod__(self, other: "RationalPolynomial"):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coeffs)
        quotient = [Fraction(0)] * max(len(remainder) - other.degree, 0)
        lead = other.leading
        for shift in range(len(remainder) - 1 - other.degree, -1, -1):
            factor = remainder[shift + other.degree] / lead
            quotient[shift] = factor
            if factor == 0:
                continue
            for k, c in enumerate(other.coeffs):
                remainder[shift + k] -= factor * c
        return RationalPolynomial(tuple(quotient)), RationalPolynomial(tuple(remainder))

    def __mod__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return divmod(self, other)[1]

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def monic(self) -> "RationalPolynomial":
        if self.is_zero:
            return self
        return self * (1 / self.leading)

    def __call__(self, x):
        """Horner evaluation; works for Fraction, float, complex, mpmath and numpy inputs."""
        result = 0 * x
        for c in reversed(self.coeffs):
            result = result * x + (float(c) if not isinstance(x, Fraction) else c)
        return result

    def evaluate_matrix(self, matrix: np.ndarray) -> np.ndarray:
        """h(A) for a square matrix A by Horner's scheme."""
        size = matrix.shape[0]
        result = np.zeros((size, size))
        for c in reversed(self.coeffs):
            result = result @ matrix + float(c) * np.eye(size)
        return result


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, lowest degree first, with a non-zero leading coefficient."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        if not coeffs or coeffs[-1] == 0:
            raise InvalidPolynomial()
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_strings(cls, values: Iterable[str]) -> "IntPolynomial":
        return cls(tuple(int(v) for v in values))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    def require_monic(self) -> "IntPolynomial":
        if not self.is_monic:
            raise NonMonic(f"Leading coefficient is {self.coeffs[-1]}, expected 1.")
        return self

    def as_rational(self) -> RationalPolynomial:
        return RationalPolynomial(self.coeffs)

    def high_first(self) -> list:
        return list(reversed(self.coeffs))

    def __call__(self, x):
        result = 0 * x
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def __str__(self):
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = {0: f"{mag}", 1: "x"}.get(k, f"x^{k}")
            if k and mag != 1:
                body = f"{mag}{body}"
            terms.append(f"{sign} {body}")
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


@dataclass(frozen=True)
class CertifiedRoot:
    """Disk of the given radius around ``value`` containing exactly one root."""

    value: complex
    radius: float

    @property
    def modulus(self) -> float:
        return abs(self.value)

    @property
    def is_real(self) -> bool:
        return self.value.imag == 0.0

    def modulus_bounds(self) -> tuple:
        return max(self.modulus - self.radius, 0.0), self.modulus + self.radius


@dataclass(frozen=True)
class RootSet:
    """
    All roots of a squarefree monic polynomial, ordered by decreasing modulus and
    then decreasing imaginary part. ``pairing[i]`` is the index of the complex
    conjugate of root ``i`` (itself for real roots).
    """

    poly: IntPolynomial
    roots: tuple
    pairing: tuple

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, index: int) -> CertifiedRoot:
        return self.roots[index]

    @cached_property
    def values(self) -> np.ndarray:
        return np.array([root.value for root in self.roots], dtype=complex)

    @property
    def max_radius(self) -> float:
        return max(root.radius for root in self.roots)

    def index_of(self, value: complex, tol: float) -> int | None:
        """Index of the root closest to ``value`` if it lies within ``tol``."""
        distances = np.abs(self.values - complex(value))
        index = int(np.argmin(distances))
        return index if distances[index] <= tol + self.roots[index].radius else None


@dataclass(frozen=True)
class SpectrumSelection:
    """A conjugation-closed non-empty subset of the roots, used ``multiplicity`` times."""

    roots: RootSet
    selected: frozenset
    multiplicity: int = 1

    def __post_init__(self):
        selected = frozenset(int(i) for i in self.selected)
        object.__setattr__(self, "selected", selected)
        if not selected:
            raise InvalidSelection("Selection is empty.")
        if any(i < 0 or i >= len(self.roots) for i in selected):
            raise InvalidSelection("Selection refers to a root index out of range.")
        if any(self.roots.pairing[i] not in selected for i in selected):
            raise InvalidSelection("Selection is not closed under complex conjugation.")
        if self.multiplicity < 1:
            raise InvalidSelection("Multiplicity must be positive.")

    @classmethod
    def from_values(
        cls, roots: RootSet, values: Sequence[complex], multiplicity: int = 1, tol: float = 1e-4
    ) -> "SpectrumSelection":
        selected = set()
        for value in values:
            index = roots.index_of(value, tol)
            if index is None:
                raise InvalidSelection(f"{value} is not a root of {roots.poly}.")
            selected.add(index)
        return cls(roots=roots, selected=frozenset(selected), multiplicity=multiplicity)

    @property
    def poly(self) -> IntPolynomial:
        return self.roots.poly

    @property
    def excluded(self) -> list:
        return [i for i in range(len(self.roots)) if i not in self.selected]

    def is_expanding(self) -> bool:
        return all(self.roots[i].modulus_bounds()[0] > 1.0 for i in self.selected)
