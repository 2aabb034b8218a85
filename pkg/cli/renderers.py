# cli/renderers.py

import csv
import hashlib
import io
import json
import math

import numpy as np
from rest_framework.renderers import BaseRenderer, JSONRenderer

from tiling.exceptions import RenderUnsupported
from tiling.models import SubstitutionRule, TilingPatch


class CanonicalJSONRenderer(JSONRenderer):
    """
    Reports with lexicographically sorted keys and floats in their shortest
    round-trip form (at most 17 significant digits). Non-finite floats become
    null so the output stays strict JSON.
    """

    indent = 2

    @classmethod
    def normalize(cls, value):
        if isinstance(value, dict):
            return {str(key): cls.normalize(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [cls.normalize(item) for item in value]
        if isinstance(value, np.ndarray):
            return cls.normalize(value.tolist())
        if isinstance(value, np.generic):
            return cls.normalize(value.item())
        if isinstance(value, float) and not math.isfinite(value):
            return None
        return value

    def render(self, data, accepted_media_type=None, renderer_context=None):
        return json.dumps(
            self.normalize(data),
            cls=self.encoder_class,
            sort_keys=True,
            indent=self.indent,
            ensure_ascii=self.ensure_ascii,
            allow_nan=False,
        ).encode("utf-8")


class DecayCSVRenderer(BaseRenderer):
    """Columns n, eps_n, bound_n; bound_n is empty where no bound applies."""

    media_type = "text/csv"
    format = "csv"
    charset = "utf-8"

    def render(self, data, accepted_media_type=None, renderer_context=None):
        eps, bounds = data["eps"], data.get("bounds")
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["n", "eps_n", "bound_n"])
        for n, value in enumerate(eps):
            bound = "" if bounds is None else repr(float(bounds[n]))
            writer.writerow([n, repr(float(value)), bound])
        return buffer.getvalue().encode(self.charset)


class PatchSVGRenderer(BaseRenderer):
    """
    Tiles as filled boxes, one colour per type derived from a hash of the
    label. Intervals are drawn as a strip; the viewBox is the bounding box of
    the patch with a 2% margin.
    """

    media_type = "image/svg+xml"
    format = "svg"
    charset = "utf-8"
    margin = 0.02

    @staticmethod
    def colour(label: int) -> str:
        return "#" + hashlib.sha256(f"tile-{label}".encode()).hexdigest()[:6]

    @staticmethod
    def boxes(rule: SubstitutionRule, patch: TilingPatch) -> tuple:
        lower = np.array([rule.prototile(int(j)).lower for j in patch.labels]) + patch.translations
        upper = np.array([rule.prototile(int(j)).upper for j in patch.labels]) + patch.translations
        if patch.d == 1:
            height = max(float(upper.max() - lower.min()) / 20, 1e-9)
            lower = np.hstack([lower, np.zeros((len(patch), 1))])
            upper = np.hstack([upper, np.full((len(patch), 1), height)])
        return lower, upper

    def render(self, data, accepted_media_type=None, renderer_context=None):
        rule, patch = data["rule"], data["patch"]
        if patch.d > 2:
            raise RenderUnsupported(f"Cannot render a patch of dimension {patch.d}.")
        lower, upper = self.boxes(rule, patch)

        # SVG y grows downwards
        top = -upper[:, 1]
        low, high = np.array([lower[:, 0].min(), top.min()]), np.array([upper[:, 0].max(), (-lower[:, 1]).max()])
        pad = self.margin * (high - low)
        origin, size = (low - pad).tolist(), (high - low + 2 * pad).tolist()

        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{origin[0]!r} {origin[1]!r} {size[0]!r} {size[1]!r}">',
        ]
        stroke = float(min(size)) / 500
        for label, lo, hi, y in zip(patch.labels, lower, upper, top):
            lines.append(
                f'<rect x="{float(lo[0])!r}" y="{float(y)!r}" width="{float(hi[0] - lo[0])!r}" '
                f'height="{float(hi[1] - lo[1])!r}" fill="{self.colour(int(label))}" '
                f'stroke="black" stroke-width="{stroke!r}"/>'
            )
        lines.append("</svg>")
        return ("\n".join(lines) + "\n").encode(self.charset)
