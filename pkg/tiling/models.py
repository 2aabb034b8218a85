# tiling/models.py

from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import product
from typing import Optional

import numpy as np

from expansion.models import ExpansionMap
from tiling.exceptions import InvalidRule, MissingControlPoints


@dataclass(frozen=True, eq=False)
class Prototile:
    """Type ``label`` (1-based) with an axis-aligned box support."""

    label: int
    box: np.ndarray  # shape (d, 2): per-axis (lo, hi)

    def __post_init__(self):
        box = np.asarray(self.box, dtype=float)
        if box.ndim != 2 or box.shape[1] != 2:
            raise InvalidRule(f"Prototile {self.label}: box must be a list of [lo, hi] pairs.")
        if np.any(box[:, 1] <= box[:, 0]):
            raise InvalidRule(f"Prototile {self.label}: box has non-positive volume.")
        object.__setattr__(self, "box", box)

    @property
    def dimension(self) -> int:
        return self.box.shape[0]

    @property
    def volume(self) -> float:
        return float(np.prod(self.box[:, 1] - self.box[:, 0]))

    @property
    def lower(self) -> np.ndarray:
        return self.box[:, 0]

    @property
    def upper(self) -> np.ndarray:
        return self.box[:, 1]

    def vertices(self) -> np.ndarray:
        return np.array(list(product(*self.box)))


@dataclass(frozen=True, eq=False)
class SubstitutionRule:
    """
    Prototiles A_1..A_kappa, digit sets D_ij (keyed by 1-based (i, j): child
    type i inside parent type j), the expansion phi, and the tile map: for
    each parent type j the index of its designated child in ``children(j)``.
    """

    prototiles: tuple
    digits: dict
    expansion: ExpansionMap
    tile_map: tuple
    name: str = ""

    def __post_init__(self):
        kappa = len(self.prototiles)
        if kappa == 0:
            raise InvalidRule("A rule needs at least one prototile.")
        if [tile.label for tile in self.prototiles] != list(range(1, kappa + 1)):
            raise InvalidRule("Prototile labels must be 1..kappa in order.")
        d = self.expansion.d
        if any(tile.dimension != d for tile in self.prototiles):
            raise InvalidRule(f"Every prototile must be a box in dimension {d}.")

        digits = {}
        for (i, j), vectors in self.digits.items():
            if not (1 <= i <= kappa and 1 <= j <= kappa):
                raise InvalidRule(f"Digit set ({i},{j}) refers to an unknown type.")
            if len(vectors) == 0:
                continue
            vectors = np.asarray(vectors, dtype=float)
            if vectors.ndim == 1 and d == 1:
                vectors = vectors.reshape(-1, 1)
            if vectors.ndim != 2 or vectors.shape[1] != d:
                raise InvalidRule(f"Digit set ({i},{j}) has vectors of the wrong dimension.")
            digits[(i, j)] = vectors
        object.__setattr__(self, "digits", digits)

        if len(self.tile_map) != kappa:
            raise InvalidRule(f"tile_map needs one entry per type, got {len(self.tile_map)}.")
        for j in range(1, kappa + 1):
            count = len(self.children(j))
            if count == 0:
                raise InvalidRule(f"Type {j} has no children.")
            if not 0 <= self.tile_map[j - 1] < count:
                raise InvalidRule(f"tile_map entry for type {j} is outside 0..{count - 1}.")

    @property
    def kappa(self) -> int:
        return len(self.prototiles)

    @property
    def d(self) -> int:
        return self.expansion.d

    def prototile(self, label: int) -> Prototile:
        return self.prototiles[label - 1]

    @cached_property
    def _children(self) -> dict:
        table = {}
        for j in range(1, self.kappa + 1):
            children = []
            for i in range(1, self.kappa + 1):
                vectors = self.digits.get((i, j))
                if vectors is None:
                    continue
                order = np.lexsort(vectors.T[::-1])
                children.extend((i, vectors[k]) for k in order)
            table[j] = children
        return table

    def children(self, j: int) -> list:
        """Children (i, u) of type j in (type, digit-lexicographic) order."""
        return self._children[j]

    def designated_child(self, j: int) -> tuple:
        return self.children(j)[self.tile_map[j - 1]]

    def with_tile_map(self, tile_map) -> "SubstitutionRule":
        return replace(self, tile_map=tuple(tile_map))


@dataclass(frozen=True, eq=False)
class TilingPatch:
    """Placed tiles: 1-based ``labels`` (n,) and ``translations`` (n, d)."""

    labels: np.ndarray
    translations: np.ndarray
    generation: int = 0
    control_points: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int).reshape(-1)
        translations = np.asarray(self.translations, dtype=float)
        if translations.ndim == 1:
            translations = translations.reshape(len(labels), -1)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "translations", translations)

    @classmethod
    def single(cls, label: int, position) -> "TilingPatch":
        position = np.atleast_1d(np.asarray(position, dtype=float))
        return cls(labels=np.array([label]), translations=position[np.newaxis, :])

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def d(self) -> int:
        return self.translations.shape[1]

    def census(self, kappa: int) -> np.ndarray:
        return np.bincount(self.labels - 1, minlength=kappa)

    def require_control_points(self) -> np.ndarray:
        if self.control_points is None:
            raise MissingControlPoints()
        return self.control_points


@dataclass(frozen=True)
class Violation:
    kind: str  # volume | containment | overlap
    parent: int
    child: Optional[int] = None
    digit: Optional[tuple] = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()
    primitive: Optional[bool] = None

    @property
    def valid(self) -> bool:
        return not self.violations


@dataclass(frozen=True, eq=False)
class FixedPointSeed:
    """A single tile placed so that it reappears in the p-th generation of itself."""

    patch: TilingPatch
    power: int

    @property
    def label(self) -> int:
        return int(self.patch.labels[0])

    @property
    def position(self) -> np.ndarray:
        return self.patch.translations[0]


@dataclass(frozen=True, eq=False)
class ReturnVectorSet:
    vectors: np.ndarray = field(repr=False)
    by_type: dict = field(repr=False)
    window: float

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class LocalComplexity:
    radius: float
    classes: int
    sampled: int
    max_return_gap: float
