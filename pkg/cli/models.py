# cli/models.py

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from django.conf import settings
from django.db import models

from cli.exceptions import InvalidRunConfig, OutputNotWritable
from expansion.models import TauFit
from spectrum.models import EigenvalueReport, FamilyResult, RhoFit, WeakMixingReport
from tiling.models import FixedPointSeed, SubstitutionRule, TilingPatch


class GapVerdict(models.TextChoices):
    STABLE = "stable", "Stable"
    SHRINKING = "shrinking", "Shrinking"
    INCONCLUSIVE = "inconclusive", "Inconclusive"


@dataclass(frozen=True)
class RunConfig:
    """
    Per-run overrides taken from the command line. Limits left as None fall
    back to the namespaced settings.
    """

    precision: Optional[float] = None
    tile_cap: Optional[int] = None
    out_dir: Optional[Path] = None
    seed_tile: Optional[int] = None
    profile_length: Optional[int] = None
    k_max: Optional[int] = None

    @classmethod
    def from_options(cls, options: dict) -> "RunConfig":
        out = options.get("out")
        config = cls(
            precision=options.get("precision"),
            tile_cap=options.get("tile_cap"),
            out_dir=Path(out) if out else None,
            seed_tile=options.get("seed_tile"),
            profile_length=options.get("profile_length"),
            k_max=options.get("k_max"),
        )
        config.check()
        return config

    def check(self) -> None:
        for name in ("precision", "tile_cap", "seed_tile"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise InvalidRunConfig(f"--{name.replace('_', '-')} must be positive, got {value}.")
        if self.profile_length is not None and self.profile_length < 8:
            raise InvalidRunConfig(f"--N must be at least 8, got {self.profile_length}.")
        if self.k_max is not None and self.k_max < 0:
            raise InvalidRunConfig(f"--K-max must be non-negative, got {self.k_max}.")
        if self.out_dir is not None:
            try:
                self.out_dir.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise OutputNotWritable(f"{self.out_dir}: {exc.strerror}")
            if not os.access(self.out_dir, os.W_OK):
                raise OutputNotWritable(f"{self.out_dir} is not writable.")

    def check_rule(self, rule: SubstitutionRule) -> None:
        if self.seed_tile is not None and self.seed_tile > rule.kappa:
            raise InvalidRunConfig(f"--seed-tile {self.seed_tile} exceeds the {rule.kappa} prototile types.")

    def overrides(self) -> dict:
        """Settings to override for the duration of the run."""
        overrides = {}
        if self.tile_cap is not None:
            overrides["TILING"] = {**settings.TILING, "TILE_CAP": self.tile_cap}
        if self.precision is not None:
            overrides["ALGEBRA"] = {**settings.ALGEBRA, "ROOT_PRECISION": self.precision}
        return overrides


@dataclass(eq=False)
class SpectrumRun:
    """Everything one pass of the spectrum pipeline produced, stage by stage."""

    rule: SubstitutionRule
    completed: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    seed: Optional[FixedPointSeed] = None
    patch: Optional[TilingPatch] = None
    origin: Optional[np.ndarray] = None
    xi: Optional[np.ndarray] = None
    periods: Optional[np.ndarray] = None
    tau_fit: Optional[TauFit] = None
    rho_fit: Optional[RhoFit] = None
    rho: Optional[np.ndarray] = None
    family: Optional[FamilyResult] = None
    probe: Optional[WeakMixingReport] = None
    report: Optional[EigenvalueReport] = None
    banner: dict = field(default_factory=dict)
    axes: list = field(default_factory=list)


@dataclass(frozen=True)
class GapTrend:
    """Meyer gaps per window (None where the window failed) and their trend."""

    windows: tuple
    gaps: tuple
    errors: tuple
    trend: str
    center: tuple = ()
