# expansion/models.py

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from algebra.models import IntPolynomial, SpectrumSelection
from expansion.exceptions import HeterogeneousMap, IndexOutOfRange


@dataclass(frozen=True)
class SpectrumBlock:
    """
    One copy psi of the canonical form: ``s`` real 1x1 blocks followed by ``t``
    rotation-scaling blocks [[a, -b], [b, a]]. Built through
    ExpansionService.build_block, which snaps the eigenvalues to certified
    roots of ``min_poly``.
    """

    min_poly: IntPolynomial
    real_eigenvalues: tuple
    complex_pairs: tuple
    selection: Optional[SpectrumSelection] = field(default=None, compare=False, repr=False)

    @property
    def s(self) -> int:
        return len(self.real_eigenvalues)

    @property
    def t(self) -> int:
        return len(self.complex_pairs)

    @property
    def m(self) -> int:
        return self.s + 2 * self.t

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Diagonal of D: real slots, then a+ib, a-ib for each pair."""
        values = [complex(lam) for lam in self.real_eigenvalues]
        for a, b in self.complex_pairs:
            values.extend([complex(a, b), complex(a, -b)])
        return np.array(values, dtype=complex)

    @cached_property
    def matrix(self) -> np.ndarray:
        psi = np.zeros((self.m, self.m))
        for k, lam in enumerate(self.real_eigenvalues):
            psi[k, k] = lam
        for k, (a, b) in enumerate(self.complex_pairs):
            i = self.s + 2 * k
            psi[i:i + 2, i:i + 2] = [[a, -b], [b, a]]
        return psi

    @cached_property
    def inverse_matrix(self) -> np.ndarray:
        inverse = np.zeros((self.m, self.m))
        for k, lam in enumerate(self.real_eigenvalues):
            inverse[k, k] = 1.0 / lam
        for k, (a, b) in enumerate(self.complex_pairs):
            i = self.s + 2 * k
            scale = a * a + b * b
            inverse[i:i + 2, i:i + 2] = [[a / scale, b / scale], [-b / scale, a / scale]]
        return inverse

    @cached_property
    def sub_blocks(self) -> list:
        """Index ranges of the sub-blocks E_k inside the copy."""
        ranges = [(k, k + 1) for k in range(self.s)]
        ranges += [(self.s + 2 * k, self.s + 2 * k + 2) for k in range(self.t)]
        return ranges


@dataclass(frozen=True)
class ExpansionMap:
    """
    The expansion phi as a block-diagonal join of copies. Homogeneous maps
    (every copy equal) have well-defined s, t and m; joins of different copies
    come from direct products.
    """

    copies: tuple

    @property
    def J(self) -> int:
        return len(self.copies)

    @property
    def homogeneous(self) -> bool:
        first = self.copies[0]
        return all(copy == first for copy in self.copies[1:])

    def _uniform(self) -> SpectrumBlock:
        if not self.homogeneous:
            raise HeterogeneousMap()
        return self.copies[0]

    @property
    def s(self) -> int:
        return self._uniform().s

    @property
    def t(self) -> int:
        return self._uniform().t

    @property
    def m(self) -> int:
        return self._uniform().m

    @property
    def min_poly(self) -> IntPolynomial:
        return self._uniform().min_poly

    @cached_property
    def d(self) -> int:
        return sum(copy.m for copy in self.copies)

    @cached_property
    def offsets(self) -> tuple:
        starts, position = [], 0
        for copy in self.copies:
            starts.append(position)
            position += copy.m
        return tuple(starts)

    def copy_slice(self, j: int) -> slice:
        if not 0 <= j < self.J:
            raise IndexOutOfRange(f"Copy index {j} outside 0..{self.J - 1}.")
        return slice(self.offsets[j], self.offsets[j] + self.copies[j].m)

    @cached_property
    def matrix(self) -> np.ndarray:
        phi = np.zeros((self.d, self.d))
        for j, copy in enumerate(self.copies):
            phi[self.copy_slice(j), self.copy_slice(j)] = copy.matrix
        return phi

    @cached_property
    def inverse_matrix(self) -> np.ndarray:
        inverse = np.zeros((self.d, self.d))
        for j, copy in enumerate(self.copies):
            inverse[self.copy_slice(j), self.copy_slice(j)] = copy.inverse_matrix
        return inverse

    @cached_property
    def sub_block_ranges(self) -> list:
        """(start, stop) of every E_jk in global coordinates."""
        return [
            (offset + lo, offset + hi)
            for offset, copy in zip(self.offsets, self.copies)
            for lo, hi in copy.sub_blocks
        ]

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([copy.eigenvalues for copy in self.copies])

    @property
    def lambda_max(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    @property
    def lambda_min(self) -> float:
        return float(np.min(np.abs(self.eigenvalues)))

    @property
    def determinant(self) -> float:
        return float(np.prod(self.eigenvalues).real)

    @property
    def dominant_real_eigenvalue(self) -> Optional[float]:
        reals = [lam for copy in self.copies for lam in copy.real_eigenvalues]
        return max(reals, key=abs) if reals else None


@dataclass(frozen=True, eq=False)
class VandermondeFamily:
    vectors: np.ndarray = field(repr=False)
    determinant: float
    normalized_determinant: float
    independent: bool


@dataclass(frozen=True, eq=False)
class TauFit:
    """tau with tau(phi^k y_j) = phi^k alpha_j."""

    tau: np.ndarray = field(repr=False)
    basis_points: np.ndarray = field(repr=False)
    normalized_determinant: float
    commutator_residual: float

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.tau)
