# expansion/exceptions.py

from algebra.exceptions import ComputationError


class ExpansionError(ComputationError):
    default_detail = "Expansion map computation failed."
    default_code = "expansion_error"


class InvalidBlock(ExpansionError):
    default_detail = "Block eigenvalue is not a root of the minimal polynomial."
    default_code = "invalid_block"


class NotExpanding(ExpansionError):
    default_detail = "Every eigenvalue of the expansion map must have modulus greater than one."
    default_code = "not_expanding"


class DimensionMismatch(ExpansionError):
    default_detail = "Vector dimension does not match the expansion map."
    default_code = "dimension_mismatch"


class NotInSingleBlock(ExpansionError):
    default_detail = "Vector has non-zero entries in more than one copy."
    default_code = "not_in_single_block"


class ZeroCoordinate(ExpansionError):
    default_detail = "F-image has a vanishing coordinate."
    default_code = "zero_coordinate"


class IndexOutOfRange(ExpansionError):
    default_detail = "Copy index out of range."
    default_code = "index_out_of_range"


class DegenerateBasis(ExpansionError):
    default_detail = "Krylov family of the chosen points is not a basis."
    default_code = "degenerate_basis"


class HeterogeneousMap(ExpansionError):
    default_detail = "The copies of this expansion map carry different spectra."
    default_code = "heterogeneous_map"


class NoBasisPoint(ExpansionError):
    default_detail = "No control point difference is close enough to the required direction."
    default_code = "no_basis_point"
