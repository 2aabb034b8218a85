# expansion/serializers.py

from rest_framework import serializers

from algebra.exceptions import ComputationError
from algebra.serializers import IntPolynomialField
from expansion.models import ExpansionMap, SpectrumBlock
from expansion.services.linear import ExpansionService


class ComplexPairField(serializers.ListField):
    child = serializers.FloatField()

    def __init__(self, **kwargs):
        kwargs.setdefault("min_length", 2)
        kwargs.setdefault("max_length", 2)
        super().__init__(**kwargs)


class SpectrumBlockSerializer(serializers.Serializer):
    """
    {"min_poly": [...], "real_blocks": [lambda...], "complex_blocks": [[a, b]...],
    "multiplicity": J}
    """

    min_poly = IntPolynomialField()
    real_blocks = serializers.ListField(child=serializers.FloatField(), required=False, default=list)
    complex_blocks = serializers.ListField(child=ComplexPairField(), required=False, default=list)
    multiplicity = serializers.IntegerField(min_value=1, required=False, default=1)

    def validate(self, attrs):
        if not attrs["real_blocks"] and not attrs["complex_blocks"]:
            raise serializers.ValidationError("An expansion copy needs at least one block.")
        try:
            block = ExpansionService.build_block(
                attrs["min_poly"], attrs["real_blocks"], [tuple(p) for p in attrs["complex_blocks"]]
            )
        except ComputationError as exc:
            raise serializers.ValidationError(str(exc.detail))
        attrs["block"] = block
        return attrs


class ExpansionSerializer(serializers.Serializer):
    """
    Either a single homogeneous description (the fields of
    SpectrumBlockSerializer) or {"copies": [block, ...]} for joined spectra.
    """

    copies = SpectrumBlockSerializer(many=True, required=False)

    def to_internal_value(self, data):
        if isinstance(data, dict) and "copies" not in data:
            data = {"copies": [data]}
        return super().to_internal_value(data)

    def validate_copies(self, value):
        if not value:
            raise serializers.ValidationError("At least one copy is required.")
        return value

    def create(self, validated_data) -> ExpansionMap:
        copies = []
        for item in validated_data["copies"]:
            copies.extend([item["block"]] * item["multiplicity"])
        return ExpansionMap(copies=tuple(copies))

    @staticmethod
    def describe_block(block: SpectrumBlock, multiplicity: int = 1) -> dict:
        return {
            "min_poly": [str(c) for c in block.min_poly.coeffs],
            "real_blocks": list(block.real_eigenvalues),
            "complex_blocks": [list(pair) for pair in block.complex_pairs],
            "multiplicity": multiplicity,
        }

    def to_representation(self, instance: ExpansionMap):
        if instance.homogeneous:
            return self.describe_block(instance.copies[0], instance.J)
        return {"copies": [self.describe_block(block) for block in instance.copies]}
