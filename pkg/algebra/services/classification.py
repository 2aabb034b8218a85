# algebra/services/classification.py

import logging
from typing import Mapping, Optional

from django.conf import settings

from algebra.exceptions import NoDominantRealRoot, Undecidable
from algebra.models import IntPolynomial, RootSet, SpectrumSelection, Verdict
from algebra.services.arithmetic import ArithmeticService
from algebra.services.roots import RootIsolationService

logger = logging.getLogger(__name__)


class PisotClassificationService:
    """
    Pisot, Perron and Pisot-family verdicts from certified root disks.
    A verdict is only "yes" or "no" when every disk involved clears the
    comparison circle; otherwise it is "undecidable".
    """

    @staticmethod
    def _tol(tol: Optional[float]) -> float:
        return settings.ALGEBRA["UNIT_CIRCLE_TOL"] if tol is None else tol

    @classmethod
    def is_pisot_family(cls, sel: SpectrumSelection, tol: Optional[float] = None) -> Verdict:
        tol = cls._tol(tol)
        undecided = False
        for index in sel.excluded:
            root = sel.roots[index]
            if root.modulus - root.radius - tol > 1.0:
                logger.debug(f"Conjugate {root.value} of {sel.poly} lies outside the unit circle")
                return Verdict.NO
            if root.modulus + root.radius + tol >= 1.0:
                undecided = True
        return Verdict.UNDECIDABLE if undecided else Verdict.YES

    @staticmethod
    def dominant_real_index(roots: RootSet) -> int:
        """Index of the largest real root, which must exceed 1."""
        candidates = [
            (root.value.real, index)
            for index, root in enumerate(roots)
            if root.is_real and root.value.real - root.radius > 1.0
        ]
        if not candidates:
            raise NoDominantRealRoot(f"{roots.poly} has no real root greater than one.")
        return max(candidates)[1]

    @classmethod
    def is_pisot_number(
        cls, poly: IntPolynomial, roots: Optional[RootSet] = None, tol: Optional[float] = None
    ) -> bool:
        roots = roots or RootIsolationService.isolate_roots(poly)
        dominant = cls.dominant_real_index(roots)
        verdict = cls.is_pisot_family(SpectrumSelection(roots, frozenset({dominant})), tol)
        if verdict == Verdict.UNDECIDABLE:
            raise Undecidable(f"A conjugate of the dominant root of {poly} touches the unit circle.")
        return verdict == Verdict.YES

    @staticmethod
    def _strictly_dominates(roots: RootSet, index: int, skip: set) -> bool:
        top = roots[index]
        low = top.modulus - top.radius
        return all(
            roots[k].modulus + roots[k].radius < low
            for k in range(len(roots))
            if k not in skip
        )

    @classmethod
    def is_perron_root(cls, poly: IntPolynomial, roots: Optional[RootSet] = None) -> bool:
        # Exact modulus ties (e.g. +-sqrt 2) are never certified strictly smaller,
        # so they report False.
        roots = roots or RootIsolationService.isolate_roots(poly)
        dominant = cls.dominant_real_index(roots)
        return cls._strictly_dominates(roots, dominant, {dominant})

    @classmethod
    def is_complex_perron(cls, roots: RootSet, index: int) -> bool:
        """Every conjugate other than the root and its mirror image is strictly smaller."""
        return cls._strictly_dominates(roots, index, {index, roots.pairing[index]})

    @staticmethod
    def multiplicity_condition(roots: RootSet, multiplicities: Mapping[int, int]) -> bool:
        """
        For every root used with multiplicity k, each conjugate is either strictly
        smaller in modulus or used with multiplicity at least k.
        """
        for index, count in multiplicities.items():
            if count < 1:
                continue
            low = roots[index].modulus - roots[index].radius
            for other, root in enumerate(roots):
                if root.modulus + root.radius < low:
                    continue
                if multiplicities.get(other, 0) < count:
                    return False
        return True

    @classmethod
    def expanding_selection(cls, roots: RootSet) -> frozenset:
        """Roots certified outside the unit circle."""
        return frozenset(i for i, root in enumerate(roots) if root.modulus - root.radius > 1.0)

    @classmethod
    def classify(
        cls,
        poly: IntPolynomial,
        selections: list,
        multiplicity: int = 1,
        precision: Optional[float] = None,
        power_sum_count: int = 10,
    ) -> dict:
        """
        Full verdict table for one polynomial. ``selections`` hold 0-based root
        indices; an empty list means the roots outside the unit circle.
        """
        roots = RootIsolationService.isolate_roots(poly, precision)

        try:
            pisot = Verdict.YES if cls.is_pisot_number(poly, roots) else Verdict.NO
            perron = Verdict.YES if cls.is_perron_root(poly, roots) else Verdict.NO
        except Undecidable:
            pisot, perron = Verdict.UNDECIDABLE, (
                Verdict.YES if cls.is_perron_root(poly, roots) else Verdict.NO
            )
        except NoDominantRealRoot:
            pisot = perron = None

        chosen = [frozenset(s) for s in selections] or [cls.expanding_selection(roots)]
        verdicts = []
        for indices in chosen:
            selection = SpectrumSelection(roots, indices, multiplicity)
            complex_perron = None
            top = min(selection.selected)
            if not roots[top].is_real:
                complex_perron = cls.is_complex_perron(roots, top)
            verdicts.append({
                "selected": sorted(i + 1 for i in selection.selected),
                "pisot_family": cls.is_pisot_family(selection).value,
                "expansion_condition": cls.multiplicity_condition(
                    roots, {i: multiplicity for i in selection.selected}
                ),
                "complex_perron": complex_perron,
            })

        logger.info(f"Classified {poly}: pisot={pisot}, perron={perron}")
        return {
            "poly": poly,
            "roots": [
                {
                    "index": i + 1,
                    "value": root.value,
                    "modulus": root.modulus,
                    "radius": root.radius,
                    "conjugate": roots.pairing[i] + 1,
                }
                for i, root in enumerate(roots)
            ],
            "pisot_number": pisot.value if pisot else None,
            "perron": perron.value if perron else None,
            "power_sums": [str(v) for v in ArithmeticService.power_sums(poly, power_sum_count)],
            "selections": verdicts,
        }
