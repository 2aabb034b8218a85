# expansion/services/linear.py

import logging
from typing import Optional, Sequence

import numpy as np
from django.conf import settings

from algebra.models import RationalPolynomial, SpectrumSelection
from algebra.services.arithmetic import ArithmeticService
from algebra.services.roots import RootIsolationService
from expansion.exceptions import DimensionMismatch, InvalidBlock, NotExpanding
from expansion.models import ExpansionMap, SpectrumBlock

logger = logging.getLogger(__name__)


class ExpansionService:
    """
    Construction and blockwise action of the expansion map.
    Vectors are numpy arrays of shape (d,) or batches of shape (n, d).
    """

    @staticmethod
    def build_block(min_poly, real_eigenvalues: Sequence[float], complex_pairs: Sequence) -> SpectrumBlock:
        """
        Match every given eigenvalue to a certified root of ``min_poly`` and
        replace it by the certified value.
        """
        roots = RootIsolationService.isolate_roots(min_poly)
        tol = settings.EXPANSION["ROOT_MATCH_TOL"]

        def match(value: complex) -> int:
            index = roots.index_of(value, tol)
            if index is None:
                raise InvalidBlock(f"{value} is not a root of {min_poly}.")
            return index

        used = set()
        reals = []
        for lam in real_eigenvalues:
            index = match(complex(lam))
            if not roots[index].is_real:
                raise InvalidBlock(f"{lam} matches a non-real root of {min_poly}.")
            used.add(index)
            reals.append(roots[index].value.real)

        pairs = []
        for a, b in complex_pairs:
            index = match(complex(a, b))
            if roots[index].is_real:
                raise InvalidBlock(f"({a}, {b}) matches a real root of {min_poly}.")
            used.update({index, roots.pairing[index]})
            value = roots[index].value
            pairs.append((value.real, value.imag))

        if len(used) != len(reals) + 2 * len(pairs):
            raise InvalidBlock(f"Block eigenvalues of {min_poly} repeat a root.")
        if not used:
            raise InvalidBlock("A copy needs at least one eigenvalue.")

        selection = SpectrumSelection(roots, frozenset(used))
        if not selection.is_expanding():
            raise NotExpanding(f"A block eigenvalue of {min_poly} has modulus at most one.")

        return SpectrumBlock(
            min_poly=min_poly,
            real_eigenvalues=tuple(reals),
            complex_pairs=tuple(pairs),
            selection=selection,
        )

    @classmethod
    def build(cls, min_poly, real_eigenvalues=(), complex_pairs=(), multiplicity: int = 1) -> ExpansionMap:
        block = cls.build_block(min_poly, real_eigenvalues, complex_pairs)
        return ExpansionMap(copies=(block,) * multiplicity)

    @staticmethod
    def join(first: ExpansionMap, second: ExpansionMap) -> ExpansionMap:
        """Block-diagonal join, used by direct products."""
        return ExpansionMap(copies=first.copies + second.copies)

    @staticmethod
    def check_dimension(phi: ExpansionMap, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != phi.d:
            raise DimensionMismatch(f"Expected last dimension {phi.d}, got shape {x.shape}.")
        return x

    @classmethod
    def apply(cls, phi: ExpansionMap, x) -> np.ndarray:
        return cls.check_dimension(phi, x) @ phi.matrix.T

    @classmethod
    def apply_transpose(cls, phi: ExpansionMap, x) -> np.ndarray:
        return cls.check_dimension(phi, x) @ phi.matrix

    @classmethod
    def apply_inverse(cls, phi: ExpansionMap, x) -> np.ndarray:
        return cls.check_dimension(phi, x) @ phi.inverse_matrix.T

    @classmethod
    def apply_power(cls, phi: ExpansionMap, x, n: int, transpose: bool = False) -> np.ndarray:
        matrix = phi.matrix if transpose else phi.matrix.T
        if n < 0:
            matrix = np.linalg.inv(matrix)
        return cls.check_dimension(phi, x) @ np.linalg.matrix_power(matrix, abs(n))

    @classmethod
    def block_norm(cls, phi: ExpansionMap, x) -> np.ndarray | float:
        """max over sub-blocks E_jk of the Euclidean norm of x_jk."""
        x = cls.check_dimension(phi, x)
        norms = np.stack(
            [np.linalg.norm(x[..., lo:hi], axis=-1) for lo, hi in phi.sub_block_ranges],
            axis=-1,
        )
        result = norms.max(axis=-1)
        return float(result) if result.ndim == 0 else result

    @classmethod
    def project(cls, phi: ExpansionMap, x, j: int) -> np.ndarray:
        """P_j: keep the entries of copy j, zero the rest."""
        x = cls.check_dimension(phi, x)
        window = phi.copy_slice(j)
        out = np.zeros_like(x)
        out[..., window] = x[..., window]
        return out

    @staticmethod
    def inverse_polynomial(phi: ExpansionMap, j: int = 0) -> RationalPolynomial:
        """h with psi_j^{-1} = h(psi_j), from x^{-1} in Q[x]/(min_poly)."""
        phi.copy_slice(j)
        copy = phi.copies[j]
        return ArithmeticService.field_inverse(RationalPolynomial((0, 1)), copy.min_poly)

    @classmethod
    def inverse_by_polynomial(cls, phi: ExpansionMap) -> np.ndarray:
        """phi^{-1} assembled from each copy's inverse polynomial."""
        inverse = np.zeros((phi.d, phi.d))
        for j, copy in enumerate(phi.copies):
            window = phi.copy_slice(j)
            inverse[window, window] = cls.inverse_polynomial(phi, j).evaluate_matrix(copy.matrix)
        return inverse

    @staticmethod
    def commutator_norm(phi: ExpansionMap, matrix: np.ndarray, probes: Optional[np.ndarray] = None) -> float:
        """max ||A phi x - phi A x|| / ||x|| over probe vectors."""
        if probes is None:
            probes = np.random.default_rng(0).standard_normal((100, phi.d))
        commutator = matrix @ phi.matrix - phi.matrix @ matrix
        return float(
            np.max(np.linalg.norm(probes @ commutator.T, axis=1) / np.linalg.norm(probes, axis=1))
        )
