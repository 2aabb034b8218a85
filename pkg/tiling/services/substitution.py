# tiling/services/substitution.py

import logging
from itertools import combinations

import numpy as np
from django.conf import settings

from expansion.services.linear import ExpansionService
from tiling.exceptions import ResourceLimit, TilingError
from tiling.models import (
    Prototile,
    SubstitutionRule,
    TilingPatch,
    ValidationReport,
    Violation,
)

logger = logging.getLogger(__name__)


class SubstitutionService:
    """The substitution omega acting on rules and patches."""

    @staticmethod
    def substitution_matrix(rule: SubstitutionRule) -> np.ndarray:
        """M[i][j] = #D_ij, 0-based rows (child type) and columns (parent type)."""
        matrix = np.zeros((rule.kappa, rule.kappa), dtype=np.int64)
        for (i, j), vectors in rule.digits.items():
            matrix[i - 1, j - 1] = len(vectors)
        return matrix

    @staticmethod
    def is_primitive(matrix) -> bool:
        """Some power M^n with n <= kappa^2 - 2 kappa + 2 is strictly positive."""
        pattern = np.asarray(matrix) > 0
        kappa = pattern.shape[0]
        bound = max(kappa * kappa - 2 * kappa + 2, 1)
        power = pattern.copy()
        for _ in range(bound):
            if power.all():
                return True
            power = (power.astype(np.int64) @ pattern.astype(np.int64)) > 0
        return bool(power.all())

    @classmethod
    def predicted_count(cls, rule: SubstitutionRule, census, k: int, cap=None) -> int:
        """Tile count of omega^k(P): the entries of M^k census summed."""
        matrix = cls.substitution_matrix(rule)
        vector = np.asarray(census, dtype=np.int64)
        for _ in range(k):
            vector = matrix @ vector
            if cap is not None and vector.sum() > cap:
                return int(vector.sum())
        return int(vector.sum())

    @classmethod
    def expand(cls, rule: SubstitutionRule, patch: TilingPatch, k: int = 1) -> TilingPatch:
        """
        omega^k(P), each parent replaced by its children in canonical order.
        Control points are not carried over.
        """
        if k < 0:
            raise TilingError("The number of substitution steps must be non-negative.")
        if k == 0 or len(patch) == 0:
            return patch

        cap = settings.TILING["TILE_CAP"]
        count = cls.predicted_count(rule, patch.census(rule.kappa), k, cap)
        if count > cap:
            raise ResourceLimit(f"omega^{k} would produce {count} tiles (cap {cap}).")

        labels, translations = patch.labels, patch.translations
        for _ in range(k):
            inflated = ExpansionService.apply(rule.expansion, translations)
            parts, parents, ranks = [], [], []
            for j in range(1, rule.kappa + 1):
                members = np.flatnonzero(labels == j)
                if members.size == 0:
                    continue
                for rank, (i, u) in enumerate(rule.children(j)):
                    parts.append((np.full(members.size, i), inflated[members] + u))
                    parents.append(members)
                    ranks.append(np.full(members.size, rank))
            order = np.lexsort((np.concatenate(ranks), np.concatenate(parents)))
            labels = np.concatenate([p[0] for p in parts])[order]
            translations = np.concatenate([p[1] for p in parts])[order]

        logger.info(f"Expanded {len(patch)} tiles {k} step(s) to {len(labels)}")
        return TilingPatch(labels=labels, translations=translations, generation=patch.generation + k)

    @classmethod
    def validate_rule(cls, rule: SubstitutionRule) -> ValidationReport:
        """
        Box arithmetic for the subdivision phi A_j = union of (D_ij + A_i):
        volume identity, containment of every child in phi A_j (its vertices
        pulled back by phi^-1 land in A_j) and pairwise interior disjointness.
        """
        tol = settings.TILING["GEOMETRY_TOL"]
        phi = rule.expansion
        scale = abs(phi.determinant)
        violations = []

        for j in range(1, rule.kappa + 1):
            parent = rule.prototile(j)
            children = rule.children(j)

            expected = scale * parent.volume
            covered = sum(rule.prototile(i).volume for i, _ in children)
            if abs(expected - covered) > 1e-9 * max(abs(expected), 1.0):
                violations.append(Violation(
                    kind="volume",
                    parent=j,
                    detail=f"|det phi| vol(A_{j}) = {expected:.12g} but the children cover {covered:.12g}",
                ))

            slack = tol * max(1.0, float(np.max(np.abs(parent.box))))
            for i, u in children:
                corners = ExpansionService.apply_inverse(phi, rule.prototile(i).vertices() + u)
                if np.any(corners < parent.lower - slack) or np.any(corners > parent.upper + slack):
                    violations.append(Violation(
                        kind="containment", parent=j, child=i, digit=tuple(u.tolist()),
                        detail=f"D_{i}{j} + A_{i} leaves phi A_{j}",
                    ))

            for (i1, u1), (i2, u2) in combinations(children, 2):
                lo = np.maximum(rule.prototile(i1).lower + u1, rule.prototile(i2).lower + u2)
                hi = np.minimum(rule.prototile(i1).upper + u1, rule.prototile(i2).upper + u2)
                if np.all(hi - lo > tol):
                    violations.append(Violation(
                        kind="overlap", parent=j, child=i1, digit=tuple(u1.tolist()),
                        detail=f"overlaps child of type {i2} at {tuple(u2.tolist())}",
                    ))

        primitive = cls.is_primitive(cls.substitution_matrix(rule))
        return ValidationReport(violations=tuple(violations), primitive=primitive)

    @classmethod
    def direct_product(cls, first: SubstitutionRule, second: SubstitutionRule) -> SubstitutionRule:
        """
        Types (i, i') become label (i - 1) kappa_2 + i', boxes multiply, digit
        sets are Cartesian sums and phi is the block-diagonal join, so the
        substitution matrix is the Kronecker product.
        """
        kappa2 = second.kappa

        def label(i: int, i2: int) -> int:
            return (i - 1) * kappa2 + i2

        prototiles = tuple(
            Prototile(label=label(a.label, b.label), box=np.vstack([a.box, b.box]))
            for a in first.prototiles
            for b in second.prototiles
        )

        digits = {}
        for (i, j), u in first.digits.items():
            for (i2, j2), v in second.digits.items():
                digits[(label(i, i2), label(j, j2))] = np.array(
                    [np.concatenate([x, y]) for x in u for y in v]
                )

        expansion = ExpansionService.join(first.expansion, second.expansion)
        provisional = SubstitutionRule(
            prototiles=prototiles,
            digits=digits,
            expansion=expansion,
            tile_map=(0,) * len(prototiles),
        )

        tile_map = []
        for j in range(1, first.kappa + 1):
            for j2 in range(1, kappa2 + 1):
                i, u = first.designated_child(j)
                i2, v = second.designated_child(j2)
                target_label, target = label(i, i2), np.concatenate([u, v])
                tile_map.append(next(
                    rank
                    for rank, (c, w) in enumerate(provisional.children(label(j, j2)))
                    if c == target_label and np.array_equal(w, target)
                ))

        name = f"{first.name} x {second.name}" if first.name or second.name else ""
        return SubstitutionRule(
            prototiles=prototiles,
            digits=provisional.digits,
            expansion=expansion,
            tile_map=tuple(tile_map),
            name=name,
        )
