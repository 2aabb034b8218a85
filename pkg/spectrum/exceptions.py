# spectrum/exceptions.py

from algebra.exceptions import ComputationError


class SpectrumError(ComputationError):
    default_detail = "Spectral computation failed."
    default_code = "spectrum_error"


class InvalidSample(SpectrumError):
    default_detail = "Return-vector sample or wave vector is unusable."
    default_code = "invalid_sample"


class NoPassingK(SpectrumError):
    default_detail = "No shift K up to the search limit makes the whole family decay."
    default_code = "no_passing_k"


class ReconstructionFailed(SpectrumError):
    default_detail = "Module coordinates are not close to bounded-denominator rationals."
    default_code = "reconstruction_failed"


class NotPisotFamily(SpectrumError):
    default_detail = "The selected roots do not form a Pisot family."
    default_code = "not_pisot_family"
