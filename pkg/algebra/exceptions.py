# algebra/exceptions.py

from rest_framework import status
from rest_framework.exceptions import APIException


class ComputationError(APIException):
    """
    Base class for every domain error raised by the computation apps.
    Carries ``default_detail`` and ``default_code`` like any DRF exception so
    reports can serialize ``{"code", "detail"}`` uniformly.
    """

    status_code = status.HTTP_422_UNPROCESSABLE_ENTITY
    default_detail = "Computation failed."
    default_code = "computation_error"

    def as_record(self) -> dict:
        return {"code": self.get_codes(), "detail": str(self.detail)}


class AlgebraError(ComputationError):
    default_detail = "Algebraic computation failed."
    default_code = "algebra_error"


class InvalidPolynomial(AlgebraError):
    default_detail = "Polynomial must have a non-zero leading coefficient."
    default_code = "invalid_polynomial"


class NonMonic(AlgebraError):
    default_detail = "Minimal polynomial must be monic."
    default_code = "non_monic"


class NotSquarefree(AlgebraError):
    default_detail = "Polynomial shares a factor with its derivative."
    default_code = "not_squarefree"


class NoDominantRealRoot(AlgebraError):
    default_detail = "Polynomial has no real root greater than one."
    default_code = "no_dominant_real_root"


class NotInvertible(AlgebraError):
    default_detail = "Element is zero modulo the polynomial."
    default_code = "not_invertible"


class NotIrreducible(AlgebraError):
    default_detail = "A proper factor of the modulus was found."
    default_code = "not_irreducible"


class NonFinite(AlgebraError):
    default_detail = "Value is not finite."
    default_code = "non_finite"


class InvalidSelection(AlgebraError):
    default_detail = "Root selection must be non-empty and closed under conjugation."
    default_code = "invalid_selection"


class CertificationFailed(AlgebraError):
    default_detail = "Could not certify disjoint root disks at the maximum working precision."
    default_code = "certification_failed"


class Undecidable(AlgebraError):
    default_detail = "A root disk touches the comparison circle at the current precision."
    default_code = "undecidable"
