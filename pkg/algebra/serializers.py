# algebra/serializers.py

import re
from fractions import Fraction

from rest_framework import serializers

from algebra.exceptions import AlgebraError
from algebra.models import IntPolynomial, RationalPolynomial

INTEGER_PATTERN = re.compile(r"^[+-]?\d+$")
RATIONAL_PATTERN = re.compile(r"^[+-]?\d+(/\d+)?$")


class IntPolynomialField(serializers.Field):
    """
    JSON array of decimal integer strings, lowest degree first,
    e.g. ["3","-4","-1","1"] for x^3 - x^2 - 4x + 3.
    """

    default_error_messages = {
        "not_a_list": "Expected a non-empty list of integer strings.",
        "bad_entry": "Coefficient {value!r} is not a decimal integer.",
        "invalid": "{detail}",
    }

    def to_internal_value(self, data):
        if not isinstance(data, list) or not data:
            self.fail("not_a_list")
        coeffs = []
        for value in data:
            if isinstance(value, bool):
                self.fail("bad_entry", value=value)
            if isinstance(value, int):
                coeffs.append(value)
            elif isinstance(value, str) and INTEGER_PATTERN.match(value.strip()):
                coeffs.append(int(value.strip()))
            else:
                self.fail("bad_entry", value=value)
        try:
            return IntPolynomial(tuple(coeffs))
        except AlgebraError as exc:
            self.fail("invalid", detail=str(exc.detail))

    def to_representation(self, value: IntPolynomial):
        return [str(c) for c in value.coeffs]


class RationalPolynomialField(serializers.Field):
    """Like IntPolynomialField but entries may be fractions such as "-1/3"."""

    default_error_messages = {
        "not_a_list": "Expected a list of rational strings.",
        "bad_entry": "Coefficient {value!r} is not a rational number.",
    }

    def to_internal_value(self, data):
        if not isinstance(data, list):
            self.fail("not_a_list")
        coeffs = []
        for value in data:
            if isinstance(value, int) and not isinstance(value, bool):
                coeffs.append(Fraction(value))
            elif isinstance(value, str) and RATIONAL_PATTERN.match(value.strip()):
                coeffs.append(Fraction(value.strip()))
            else:
                self.fail("bad_entry", value=value)
        return RationalPolynomial(tuple(coeffs))

    def to_representation(self, value: RationalPolynomial):
        return [str(c) for c in value.coeffs]


class PolynomialFileSerializer(serializers.Serializer):
    """
    Input of the classify command. Selections list 1-based root indices in the
    order of the root table (decreasing modulus).
    """

    poly = IntPolynomialField()
    selections = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=False),
        required=False,
        default=list,
    )
    multiplicity = serializers.IntegerField(min_value=1, required=False, default=1)

    def to_internal_value(self, data):
        if isinstance(data, list):
            data = {"poly": data}
        return super().to_internal_value(data)

    def validate_poly(self, value: IntPolynomial):
        if not value.is_monic:
            raise serializers.ValidationError("Minimal polynomial must be monic.")
        if value.degree < 1:
            raise serializers.ValidationError("Polynomial must have degree at least 1.")
        return value

    def validate(self, attrs):
        degree = attrs["poly"].degree
        for selection in attrs["selections"]:
            if max(selection) > degree:
                raise serializers.ValidationError(
                    {"selections": f"Root index {max(selection)} exceeds degree {degree}."}
                )
        return attrs


class CertifiedRootSerializer(serializers.Serializer):
    index = serializers.IntegerField()
    real = serializers.FloatField(source="value.real")
    imag = serializers.FloatField(source="value.imag")
    modulus = serializers.FloatField()
    radius = serializers.FloatField()
    conjugate = serializers.IntegerField()


class SelectionVerdictSerializer(serializers.Serializer):
    selected = serializers.ListField(child=serializers.IntegerField())
    pisot_family = serializers.CharField()
    expansion_condition = serializers.BooleanField()
    complex_perron = serializers.BooleanField(allow_null=True)


class ClassificationSerializer(serializers.Serializer):
    poly = IntPolynomialField()
    roots = CertifiedRootSerializer(many=True)
    pisot_number = serializers.CharField(allow_null=True)
    perron = serializers.CharField(allow_null=True)
    power_sums = serializers.ListField(child=serializers.CharField())
    selections = SelectionVerdictSerializer(many=True)
