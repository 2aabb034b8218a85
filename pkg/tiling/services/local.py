# tiling/services/local.py

import logging
from collections import defaultdict
from typing import Optional

import numpy as np
from django.conf import settings

from tiling.exceptions import WindowTooSmall
from tiling.models import LocalComplexity, ReturnVectorSet, TilingPatch

logger = logging.getLogger(__name__)


def _keys(vectors: np.ndarray, tol: float) -> np.ndarray:
    return np.round(np.asarray(vectors) / tol).astype(np.int64)


def _merge(vectors: np.ndarray, tol: float) -> np.ndarray:
    """Drop vectors that agree with an earlier one on the tol-grid."""
    if len(vectors) == 0:
        return vectors
    _, index = np.unique(_keys(vectors, tol), axis=0, return_index=True)
    return vectors[np.sort(index)]


def _in_window(points: np.ndarray, window: Optional[float], center) -> np.ndarray:
    if window is None:
        return np.ones(len(points), dtype=bool)
    center = np.zeros(points.shape[1]) if center is None else np.asarray(center, dtype=float)
    return np.linalg.norm(points - center, axis=1) <= window


def min_distance(points: np.ndarray, floor: float = 0.0) -> float:
    """Smallest pairwise distance above ``floor``, by a sweep along the first axis."""
    if len(points) < 2:
        return float("inf")
    ordered = points[np.argsort(points[:, 0], kind="stable")]
    best = float("inf")
    for k in range(1, len(ordered)):
        spread = ordered[k:, 0] - ordered[:-k, 0]
        if spread.min() >= best:
            break
        distances = np.linalg.norm(ordered[k:] - ordered[:-k], axis=1)
        distances = distances[distances > floor]
        if distances.size:
            best = min(best, float(distances.min()))
    return best


class LocalStructureService:
    """
    Return vectors, periods and local complexity of a finite patch with
    control points. Windows are Euclidean balls around ``center``.
    """

    @staticmethod
    def return_vectors(patch: TilingPatch, window: Optional[float] = None, center=None) -> ReturnVectorSet:
        """Differences c(T') - c(T) of same-type tiles whose control points lie in the window."""
        tol = settings.TILING["MERGE_TOL"]
        points = patch.require_control_points()
        inside = _in_window(points, window, center)

        by_type = {}
        for label in np.unique(patch.labels):
            chosen = points[inside & (patch.labels == label)]
            if len(chosen) == 0:
                continue
            differences = (chosen[:, np.newaxis, :] - chosen[np.newaxis, :, :]).reshape(-1, patch.d)
            by_type[int(label)] = _merge(differences, tol)

        if by_type:
            vectors = _merge(np.vstack(list(by_type.values())), tol)
        else:
            vectors = np.zeros((1, patch.d))
        return ReturnVectorSet(vectors=vectors, by_type=by_type, window=window)

    @classmethod
    def periods(cls, patch: TilingPatch, window: float, center=None) -> np.ndarray:
        """
        Candidate translational periods: non-zero return vectors v of norm at
        most a quarter of the window, common to every type, such that each
        window tile T with c(T) + v still inside the window and the patch hull
        has T + v in the patch.
        """
        tol = settings.TILING["MERGE_TOL"]
        points = patch.require_control_points()
        center = np.zeros(patch.d) if center is None else np.asarray(center, dtype=float)
        xi = cls.return_vectors(patch, window, center)
        if not xi.by_type:
            return np.zeros((0, patch.d))

        common = None
        for vectors in xi.by_type.values():
            keys = {tuple(key) for key in _keys(vectors, tol)}
            common = keys if common is None else common & keys
        representatives = {tuple(key): v for key, v in zip(_keys(xi.vectors, tol), xi.vectors)}
        zero = (0,) * patch.d
        candidates = [
            representatives[key] for key in sorted(common)
            if key != zero and np.linalg.norm(representatives[key]) <= window / 4
        ]

        tiles = {(int(label), tuple(key)) for label, key in zip(patch.labels, _keys(points, tol))}
        inside = _in_window(points, window, center)
        order = np.argsort(np.linalg.norm(points - center, axis=1), kind="stable")
        order = order[inside[order]]
        lower, upper = points.min(axis=0) - tol, points.max(axis=0) + tol

        found = []
        for v in candidates:
            shifted = points[order] + v
            keep = (
                (np.linalg.norm(shifted - center, axis=1) <= window)
                & np.all(shifted >= lower, axis=1)
                & np.all(shifted <= upper, axis=1)
            )
            if not keep.any():
                continue
            keys = _keys(shifted[keep], tol)
            labels = patch.labels[order][keep]
            if all((int(label), tuple(key)) in tiles for label, key in zip(labels, keys)):
                found.append(v)

        logger.info(f"{len(found)} period candidate(s) among {len(candidates)} common return vectors")
        return np.array(found).reshape(-1, patch.d)

    @staticmethod
    def _interior(points: np.ndarray, radius: float) -> np.ndarray:
        lower, upper = points.min(axis=0), points.max(axis=0)
        if np.min(upper - lower) / 2 < 3 * radius:
            raise WindowTooSmall(
                f"Patch half-width {np.min(upper - lower) / 2:.4g} is below 3R = {3 * radius:.4g}."
            )
        return np.all((points >= lower + radius) & (points <= upper - radius), axis=1)

    @classmethod
    def flc_census(cls, patch: TilingPatch, radius: float) -> LocalComplexity:
        """
        Translation classes of R-patches [B_R(c(T))] - c(T) over tiles at
        least R away from the hull of the patch, together with the largest
        distance between an occurrence of a class and its nearest repeat.
        """
        tol = settings.TILING["MERGE_TOL"]
        points = patch.require_control_points()
        interior = np.flatnonzero(cls._interior(points, radius))

        occurrences = defaultdict(list)
        for start in range(0, len(interior), 256):
            block = interior[start:start + 256]
            offsets = points[np.newaxis, :, :] - points[block][:, np.newaxis, :]
            near = np.linalg.norm(offsets, axis=2) <= radius
            for row, index in enumerate(block):
                members = np.flatnonzero(near[row])
                keys = _keys(offsets[row, members], tol)
                signature = tuple(sorted(
                    (int(label), *map(int, key)) for label, key in zip(patch.labels[members], keys)
                ))
                occurrences[signature].append(points[index])

        gap = 0.0
        for seen in occurrences.values():
            if len(seen) < 2:
                continue
            seen = np.array(seen)
            distances = np.linalg.norm(seen[:, np.newaxis, :] - seen[np.newaxis, :, :], axis=2)
            np.fill_diagonal(distances, np.inf)
            gap = max(gap, float(distances.min(axis=1).max()))

        logger.info(f"{len(occurrences)} patch classes of radius {radius} over {len(interior)} tiles")
        return LocalComplexity(
            radius=radius,
            classes=len(occurrences),
            sampled=len(interior),
            max_return_gap=gap,
        )

    @staticmethod
    def meyer_gap(points, window: float, center=None) -> float:
        """Smallest distance between distinct points of Y - Y, Y the points inside the window."""
        tol = settings.TILING["MERGE_TOL"]
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, np.newaxis]
        chosen = _merge(points[_in_window(points, window, center)], tol)
        if len(chosen) < 2:
            raise WindowTooSmall(f"Only {len(chosen)} point(s) within window {window}.")
        differences = (chosen[:, np.newaxis, :] - chosen[np.newaxis, :, :]).reshape(-1, points.shape[1])
        return min_distance(_merge(differences, tol), floor=tol)
