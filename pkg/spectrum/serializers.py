# spectrum/serializers.py

from rest_framework import serializers


def vector(values) -> list:
    return [float(v) for v in values]


class ScreenedCandidateSerializer(serializers.Serializer):
    gamma = serializers.SerializerMethodField()
    provenance = serializers.CharField(source="candidate.provenance")
    label = serializers.CharField(source="candidate.label")
    verdict = serializers.CharField(source="profile.verdict")
    rate = serializers.FloatField(source="profile.fitted_rate")
    truncated_at = serializers.IntegerField(source="profile.truncated_at", allow_null=True)
    high_precision = serializers.BooleanField(source="profile.high_precision")

    def get_gamma(self, entry):
        return vector(entry.candidate.gamma)


class EigenvalueReportSerializer(serializers.Serializer):
    """{candidates: [{gamma, provenance, verdict, rate}], rank, relatively_dense}"""

    candidates = ScreenedCandidateSerializer(source="entries", many=True)
    rank = serializers.IntegerField()
    relatively_dense = serializers.BooleanField()
    closure_violations = serializers.SerializerMethodField()

    def get_closure_violations(self, report):
        return [
            [vector(first.candidate.gamma), vector(second.candidate.gamma)]
            for first, second in report.closure_violations
        ]


class FamilyResultSerializer(serializers.Serializer):
    K = serializers.IntegerField()
    determinant = serializers.FloatField()
    normalized_determinant = serializers.FloatField()
    members = ScreenedCandidateSerializer(many=True)


class RhoFitSerializer(serializers.Serializer):
    rho = serializers.SerializerMethodField()
    denominator = serializers.IntegerField()
    worst_residual = serializers.FloatField()
    sampled = serializers.IntegerField()

    def get_rho(self, fit):
        return [vector(row) for row in fit.rho]


class WeakMixingReportSerializer(serializers.Serializer):
    screened = serializers.SerializerMethodField()
    decaying_nonzero = serializers.IntegerField()
    consistent_with_weak_mixing = serializers.BooleanField()

    def get_screened(self, report):
        return len(report.entries)
