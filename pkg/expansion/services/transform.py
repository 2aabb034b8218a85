# expansion/services/transform.py

from typing import Optional

import numpy as np
from django.conf import settings

from expansion.exceptions import NotInSingleBlock, ZeroCoordinate
from expansion.models import ExpansionMap, VandermondeFamily
from expansion.services.linear import ExpansionService

SQRT2 = np.sqrt(2.0)


class FTransformService:
    """
    The complex coordinates that diagonalize each copy. For x in H_j the real
    slots are copied and each rotation-scaling pair (x1, x2) becomes
    ((x1 + i x2)/sqrt2, (x1 - i x2)/sqrt2), so F(psi x) = D F(x) with D the
    eigenvalue diagonal and F preserves the scalar product.
    """

    @staticmethod
    def locate_copy(phi: ExpansionMap, x: np.ndarray) -> int:
        """The only copy where ``x`` has non-zero entries (0 for the zero vector)."""
        occupied = [
            j for j in range(phi.J)
            if np.any(x[..., phi.copy_slice(j)] != 0)
        ]
        if len(occupied) > 1:
            raise NotInSingleBlock(f"Vector occupies copies {occupied}.")
        return occupied[0] if occupied else 0

    @classmethod
    def f_transform(cls, phi: ExpansionMap, x, j: Optional[int] = None) -> np.ndarray:
        x = ExpansionService.check_dimension(phi, x)
        located = cls.locate_copy(phi, x)
        if j is None:
            j = located
        elif np.any(x != 0) and located != j:
            raise NotInSingleBlock(f"Vector lies in copy {located}, not {j}.")

        window = phi.copy_slice(j)
        copy = phi.copies[j]
        local = x[..., window]
        out = np.empty(local.shape, dtype=complex)
        out[..., :copy.s] = local[..., :copy.s]
        first = (local[..., copy.s::2] + 1j * local[..., copy.s + 1::2]) / SQRT2
        out[..., copy.s::2] = first
        out[..., copy.s + 1::2] = np.conj(first)
        return out

    @staticmethod
    def f_inverse(phi: ExpansionMap, z, j: int = 0) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        window = phi.copy_slice(j)
        copy = phi.copies[j]
        local = np.empty(z.shape, dtype=float)
        local[..., :copy.s] = z[..., :copy.s].real
        first, second = z[..., copy.s::2], z[..., copy.s + 1::2]
        local[..., copy.s::2] = ((first + second) / SQRT2).real
        local[..., copy.s + 1::2] = ((first - second) / (1j * SQRT2)).real
        out = np.zeros(z.shape[:-1] + (phi.d,))
        out[..., window] = local
        return out

    @staticmethod
    def diagonal(phi: ExpansionMap, j: int = 0) -> np.ndarray:
        phi.copy_slice(j)
        return phi.copies[j].eigenvalues


class VectorFamilyService:
    """The vectors alpha_j, beta_j and the Krylov families built on them."""

    @staticmethod
    def alpha_vectors(phi: ExpansionMap) -> list:
        alphas = []
        for j in range(phi.J):
            alpha = np.zeros(phi.d)
            alpha[phi.copy_slice(j)] = 1.0
            alphas.append(alpha)
        return alphas

    @classmethod
    def beta_vectors(cls, phi: ExpansionMap, alphas: Optional[list] = None) -> list:
        """F(beta_j) is the componentwise reciprocal of conj F(alpha_j)."""
        alphas = cls.alpha_vectors(phi) if alphas is None else alphas
        betas = []
        for j, alpha in enumerate(alphas):
            image = FTransformService.f_transform(phi, alpha, j)
            scale = max(np.max(np.abs(image)), 1.0)
            if np.any(np.abs(image) <= 1e-15 * scale):
                raise ZeroCoordinate(f"F(alpha_{j}) has a vanishing entry.")
            betas.append(FTransformService.f_inverse(phi, 1.0 / np.conj(image), j))
        return betas

    @staticmethod
    def krylov(phi: ExpansionMap, x: np.ndarray, length: int) -> np.ndarray:
        """Rows x, phi x, ..., phi^(length-1) x."""
        rows = [np.asarray(x, dtype=float)]
        for _ in range(length - 1):
            rows.append(phi.matrix @ rows[-1])
        return np.array(rows)

    @staticmethod
    def normalized_determinant(matrix: np.ndarray) -> tuple:
        """(det, det divided by the product of row norms); the latter lies in [-1, 1]."""
        determinant = float(np.linalg.det(matrix))
        norms = np.prod(np.linalg.norm(matrix, axis=1))
        return determinant, (determinant / norms if norms > 0 else 0.0)

    @classmethod
    def vandermonde_family(cls, phi: ExpansionMap, x, j: Optional[int] = None, tol: Optional[float] = None):
        x = ExpansionService.check_dimension(phi, x)
        j = FTransformService.locate_copy(phi, x) if j is None else j
        window = phi.copy_slice(j)
        vectors = cls.krylov(phi, x, phi.copies[j].m)
        determinant, normalized = cls.normalized_determinant(vectors[:, window])
        tol = settings.EXPANSION["DET_TOL"] if tol is None else tol
        return VandermondeFamily(
            vectors=vectors,
            determinant=determinant,
            normalized_determinant=normalized,
            independent=abs(normalized) > tol,
        )

    @classmethod
    def module_basis(cls, phi: ExpansionMap) -> tuple:
        """d x d matrix whose rows are phi^k alpha_j, and its determinant."""
        rows = [
            cls.krylov(phi, alpha, phi.copies[j].m)
            for j, alpha in enumerate(cls.alpha_vectors(phi))
        ]
        basis = np.vstack(rows)
        return basis, float(np.linalg.det(basis))

    @classmethod
    def module_coordinates(cls, phi: ExpansionMap, x) -> np.ndarray:
        """Coefficients c with x = sum c_jk phi^k alpha_j."""
        basis, _ = cls.module_basis(phi)
        x = ExpansionService.check_dimension(phi, x)
        return np.linalg.solve(basis.T, x.T).T

    @staticmethod
    def module_values(phi: ExpansionMap, eta, j: int) -> np.ndarray:
        """Values p(lambda_k) of the polynomial p with P_j eta = p(psi) alpha_j."""
        projected = ExpansionService.project(phi, eta, j)
        alpha = np.zeros(phi.d)
        alpha[phi.copy_slice(j)] = 1.0
        return (
            FTransformService.f_transform(phi, projected, j)
            / FTransformService.f_transform(phi, alpha, j)
        )
