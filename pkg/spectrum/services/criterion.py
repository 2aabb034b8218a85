# spectrum/services/criterion.py

import logging
from typing import Optional

import mpmath
import numpy as np
from django.conf import settings

from algebra.models import SpectrumSelection, Verdict
from algebra.services.classification import PisotClassificationService
from expansion.models import ExpansionMap
from spectrum.exceptions import InvalidSample, NotPisotFamily
from spectrum.models import DecayProfile, ProfileVerdict

logger = logging.getLogger(__name__)

DOUBLE_LIMIT = 2.0 ** 53


class CriterionService:
    """
    The eigenvalue criterion: gamma is an eigenvalue when dist(<phi^n x, gamma>, Z)
    tends to zero uniformly over return vectors x and <x, gamma> is an integer
    on every period x.
    """

    @staticmethod
    def as_matrix(phi) -> np.ndarray:
        return phi.matrix if isinstance(phi, ExpansionMap) else np.asarray(phi, dtype=float)

    @staticmethod
    def _double_eps(transpose: np.ndarray, xi: np.ndarray, gamma: np.ndarray, steps: int) -> tuple:
        eps, w = [], gamma.copy()
        for n in range(steps + 1):
            values = xi @ w
            if np.max(np.abs(values)) > DOUBLE_LIMIT:
                logger.warning(f"Profile truncated at n={n}: pairing exceeds 2^53")
                return np.array(eps), n
            eps.append(float(np.max(np.abs(values - np.rint(values)))))
            w = transpose @ w
        return np.array(eps), None

    @staticmethod
    def _mp_eps(transpose: np.ndarray, xi: np.ndarray, gamma: np.ndarray, steps: int, bits: int) -> tuple:
        eps = []
        limit = mpmath.mpf(2) ** (bits - 11)
        with mpmath.workprec(bits):
            matrix = mpmath.matrix(transpose.tolist())
            w = mpmath.matrix(gamma.tolist())
            rows = [[mpmath.mpf(v) for v in row] for row in xi.tolist()]
            for n in range(steps + 1):
                values = [mpmath.fdot(row, w) for row in rows]
                if max(abs(v) for v in values) > limit:
                    logger.warning(f"Profile truncated at n={n}: pairing exceeds 2^{bits - 11}")
                    return np.array(eps), n
                eps.append(float(max(abs(v - mpmath.nint(v)) for v in values)))
                w = matrix * w
        return np.array(eps), None

    @staticmethod
    def fit_rate(eps: np.ndarray) -> float:
        """exp of the least-squares slope of log eps over the second half; 0 when it vanishes there."""
        n = np.arange(len(eps))
        tail = n >= len(eps) // 2
        positive = tail & (eps > 0)
        if positive.sum() < 2:
            return 0.0
        slope = np.polyfit(n[positive], np.log(eps[positive]), 1)[0]
        return float(np.exp(slope))

    @classmethod
    def classify(cls, eps: np.ndarray, periods_ok: bool = True) -> tuple:
        """(fitted_rate, verdict) under the configured thresholds."""
        config = settings.SPECTRUM
        rate = cls.fit_rate(eps)
        if not periods_ok:
            return rate, ProfileVerdict.STALLS
        if len(eps) < 8:
            return rate, ProfileVerdict.INCONCLUSIVE
        tail = eps[len(eps) // 2:]
        if eps[-1] < config["DECAY_THRESHOLD"] and rate < config["RATE_CAP"]:
            return rate, ProfileVerdict.DECAYS
        if tail.min() > config["STALL_FLOOR"]:
            return rate, ProfileVerdict.STALLS
        return rate, ProfileVerdict.INCONCLUSIVE

    @classmethod
    def criterion_profile(cls, phi, xi, periods, gamma, steps: Optional[int] = None) -> DecayProfile:
        config = settings.SPECTRUM
        steps = config["PROFILE_LENGTH"] if steps is None else steps
        matrix = cls.as_matrix(phi)
        xi = np.asarray(xi, dtype=float).reshape(-1, matrix.shape[0])
        gamma = np.asarray(gamma, dtype=float).reshape(-1)

        if steps < 8:
            raise InvalidSample(f"Profile length must be at least 8, got {steps}.")
        if len(xi) == 0 or not np.any(np.all(xi == 0, axis=1)):
            raise InvalidSample("The return-vector sample must be non-empty and contain 0.")
        if gamma.shape != (matrix.shape[0],):
            raise InvalidSample(f"Wave vector must have dimension {matrix.shape[0]}.")

        periods = np.asarray(periods, dtype=float).reshape(-1, matrix.shape[0])
        periods_ok = True
        if len(periods):
            pairing = periods @ gamma
            periods_ok = bool(np.all(np.abs(pairing - np.rint(pairing)) <= config["PERIOD_TOL"]))

        lam_max = float(np.max(np.abs(np.linalg.eigvals(matrix))))
        scale = lam_max ** steps * float(np.max(np.linalg.norm(xi, axis=1))) * float(np.linalg.norm(gamma))
        high_precision = scale > config["HIGH_PRECISION_TRIGGER"]
        if high_precision:
            eps, truncated = cls._mp_eps(matrix.T, xi, gamma, steps, config["HIGH_PRECISION_BITS"])
        else:
            eps, truncated = cls._double_eps(matrix.T, xi, gamma, steps)

        rate, verdict = cls.classify(eps, periods_ok)
        return DecayProfile(
            eps=eps,
            fitted_rate=rate,
            verdict=verdict,
            truncated_at=truncated,
            periods_ok=periods_ok,
            high_precision=high_precision,
        )

    @staticmethod
    def pisot_decay_bound(selection: SpectrumSelection, n: int) -> float:
        """Sum of |gamma|^n over the conjugates left out of the selection."""
        if PisotClassificationService.is_pisot_family(selection) != Verdict.YES:
            raise NotPisotFamily(f"Selection of {selection.poly} is not a Pisot family.")
        return float(sum(selection.roots[k].modulus ** n for k in selection.excluded))
