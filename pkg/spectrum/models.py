# spectrum/models.py

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.db import models

from spectrum.exceptions import InvalidSample


class Provenance(models.TextChoices):
    CONSTRUCTED = "constructed", "Constructed family"
    GRID = "grid", "Grid scan"
    USER = "user", "User supplied"


class ProfileVerdict(models.TextChoices):
    DECAYS = "decays", "Decays"
    STALLS = "stalls", "Stalls"
    INCONCLUSIVE = "inconclusive", "Inconclusive"


@dataclass(frozen=True, eq=False)
class EigenvalueCandidate:
    """A wave vector gamma; constructed members also record (copy j, shift l, K)."""

    gamma: np.ndarray
    provenance: str = Provenance.USER
    copy: Optional[int] = None
    shift: Optional[int] = None
    K: Optional[int] = None

    def __post_init__(self):
        gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        if not np.all(np.isfinite(gamma)):
            raise InvalidSample("Wave vector has non-finite coordinates.")
        object.__setattr__(self, "gamma", gamma)

    @property
    def label(self) -> str:
        if self.provenance == Provenance.CONSTRUCTED:
            return f"constructed(j={self.copy + 1}, l={self.shift}, K={self.K})"
        return str(self.provenance)


@dataclass(frozen=True, eq=False)
class DecayProfile:
    """
    eps[n] = max over the sample of dist(<phi^n x, gamma>, Z). ``fitted_rate``
    is the per-step factor exp(slope) of a least-squares line through log eps
    over the tail.
    """

    eps: np.ndarray = field(repr=False)
    fitted_rate: float
    verdict: str
    truncated_at: Optional[int] = None
    periods_ok: bool = True
    high_precision: bool = False

    @property
    def length(self) -> int:
        return len(self.eps) - 1

    def as_dict(self) -> dict:
        return {
            "eps": [float(e) for e in self.eps],
            "fitted_rate": self.fitted_rate,
            "verdict": str(self.verdict),
            "truncated_at": self.truncated_at,
            "periods_ok": self.periods_ok,
            "high_precision": self.high_precision,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecayProfile":
        return cls(**{**data, "eps": np.asarray(data["eps"], dtype=float)})


@dataclass(frozen=True, eq=False)
class ScreenedCandidate:
    candidate: EigenvalueCandidate
    profile: DecayProfile

    @property
    def accepted(self) -> bool:
        return self.profile.verdict == ProfileVerdict.DECAYS


@dataclass(frozen=True, eq=False)
class FamilyResult:
    """The constructed eigenvalue family at the smallest passing K."""

    K: int
    members: tuple
    determinant: float
    normalized_determinant: float

    @property
    def gammas(self) -> np.ndarray:
        return np.array([member.candidate.gamma for member in self.members])


@dataclass(frozen=True, eq=False)
class RhoFit:
    """rho = tau^-1 / b with b the common denominator of the module coordinates."""

    rho: np.ndarray = field(repr=False)
    denominator: int
    worst_residual: float
    sampled: int


@dataclass(frozen=True, eq=False)
class EigenvalueReport:
    entries: tuple
    rank: int
    relatively_dense: bool
    closure_violations: tuple = ()

    @property
    def accepted(self) -> list:
        return [entry for entry in self.entries if entry.accepted]


@dataclass(frozen=True, eq=False)
class WeakMixingReport:
    entries: tuple
    decaying_nonzero: int

    @property
    def consistent_with_weak_mixing(self) -> bool:
        return self.decaying_nonzero == 0
