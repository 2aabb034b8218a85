# tiling/serializers.py

from numbers import Real

from rest_framework import serializers

from algebra.models import RationalPolynomial
from algebra.serializers import RationalPolynomialField
from expansion.serializers import ExpansionSerializer
from tiling.exceptions import InvalidRule
from tiling.models import Prototile, SubstitutionRule


class CoordinateField(serializers.Field):
    """
    A number, or {"zlambda": ["c0", "c1", ...]} for c0 + c1 lambda + ...
    with lambda the dominant real eigenvalue of the rule's expansion. The
    latter stays a RationalPolynomial until the expansion is known.
    """

    default_error_messages = {
        "invalid": "Expected a number or {{\"zlambda\": [...]}}, got {value!r}.",
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail("invalid", value=data)
        if isinstance(data, Real):
            return float(data)
        if isinstance(data, dict) and set(data) == {"zlambda"}:
            return RationalPolynomialField().to_internal_value(data["zlambda"])
        self.fail("invalid", value=data)

    def to_representation(self, value):
        return float(value)


class PrototileSerializer(serializers.Serializer):
    label = serializers.IntegerField(min_value=1)
    box = serializers.ListField(
        child=serializers.ListField(child=CoordinateField(), min_length=2, max_length=2),
        allow_empty=False,
    )


class TilingSpecSerializer(serializers.Serializer):
    """
    {"prototiles": [{"label": 1, "box": [[lo, hi], ...]}, ...],
     "digits": {"i,j": [[v...], ...]}, "expansion": {...}, "tile_map": [...]}
    Digit keys are 1-based "child,parent"; tile_map[j-1] picks the designated
    child of type j in (type, digit-lexicographic) order.
    """

    name = serializers.CharField(required=False, default="", allow_blank=True)
    prototiles = PrototileSerializer(many=True, allow_empty=False)
    digits = serializers.DictField(
        child=serializers.ListField(child=serializers.ListField(child=CoordinateField(), allow_empty=False))
    )
    expansion = ExpansionSerializer()
    tile_map = serializers.ListField(child=serializers.IntegerField(min_value=0))

    @staticmethod
    def _parse_key(key: str) -> tuple:
        try:
            i, j = (int(part) for part in key.split(","))
        except ValueError:
            raise serializers.ValidationError({"digits": f"Key {key!r} is not of the form \"i,j\"."})
        return i, j

    def validate(self, attrs):
        phi = ExpansionSerializer().create(attrs["expansion"])
        lam = phi.dominant_real_eigenvalue

        def resolve(value):
            if isinstance(value, RationalPolynomial):
                if lam is None:
                    raise serializers.ValidationError("zlambda entries need a real eigenvalue in the expansion.")
                return float(value(lam))
            return value

        prototiles = sorted(attrs["prototiles"], key=lambda item: item["label"])
        digits = {
            self._parse_key(key): [[resolve(x) for x in vector] for vector in vectors]
            for key, vectors in attrs["digits"].items()
        }
        try:
            attrs["rule"] = SubstitutionRule(
                prototiles=tuple(
                    Prototile(label=item["label"], box=[[resolve(x) for x in pair] for pair in item["box"]])
                    for item in prototiles
                ),
                digits=digits,
                expansion=phi,
                tile_map=tuple(attrs["tile_map"]),
                name=attrs["name"],
            )
        except InvalidRule as exc:
            raise serializers.ValidationError(str(exc.detail))
        return attrs

    def create(self, validated_data) -> SubstitutionRule:
        return validated_data["rule"]


class ViolationSerializer(serializers.Serializer):
    kind = serializers.CharField()
    parent = serializers.IntegerField()
    child = serializers.IntegerField(allow_null=True)
    digit = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    detail = serializers.CharField()


class ValidationReportSerializer(serializers.Serializer):
    valid = serializers.BooleanField()
    primitive = serializers.BooleanField(allow_null=True)
    violations = ViolationSerializer(many=True)


class PatchSerializer(serializers.Serializer):
    """Export form: {"generation": k, "tiles": [{"label", "translation"[, "control_point"]}]}."""

    def to_representation(self, patch):
        tiles = []
        for index, (label, translation) in enumerate(zip(patch.labels, patch.translations)):
            tile = {"label": int(label), "translation": translation.tolist()}
            if patch.control_points is not None:
                tile["control_point"] = patch.control_points[index].tolist()
            tiles.append(tile)
        return {"generation": patch.generation, "tiles": tiles}

