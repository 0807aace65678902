"""JSON schema of every report the commands print"""

from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from .formulas import IntPoly
from .gf import field_new
from .services.census_service import CensusReport, NrReport


class IntPolyField(serializers.Field):
    """IntPoly as its coefficient list, lowest degree first"""

    def to_representation(self, value):
        return value.to_list()

    def to_internal_value(self, data):
        if not isinstance(data, list) or not all(isinstance(c, int) for c in data):
            raise serializers.ValidationError("expected a list of integer coefficients")
        return IntPoly(data)


class FieldSerializer(serializers.Serializer):
    """Field spec {p, k, q}"""

    p = serializers.IntegerField(min_value=2)
    k = serializers.IntegerField(min_value=1)
    q = serializers.IntegerField(min_value=2)

    def validate(self, attrs):
        if attrs["p"] ** attrs["k"] != attrs["q"]:
            raise serializers.ValidationError("q must equal p^k")
        return attrs


# pylint: disable=abstract-method
class CensusReportSerializer(serializers.Serializer):
    """{field:{p,k,q}, n, total, counts:{...}, elapsed_ms, workers, seed?, params?}"""

    key = serializers.CharField()
    field = FieldSerializer()
    n = serializers.IntegerField(min_value=1)
    total = serializers.IntegerField(min_value=0)
    counts = serializers.DictField(child=serializers.IntegerField(min_value=0))
    summary = serializers.DictField(child=serializers.IntegerField(), required=False)
    elapsed_ms = serializers.FloatField()
    workers = serializers.IntegerField(min_value=1)
    backend = serializers.CharField(required=False, default="local")
    seed = serializers.IntegerField(allow_null=True, required=False)
    params = serializers.DictField(child=serializers.CharField(), required=False)

    def create(self, validated_data):
        spec = validated_data.pop("field")
        report_cls = NrReport if validated_data["key"] == "nr" else CensusReport
        return report_cls(field=field_new(spec["p"], spec["k"]), **validated_data)


class SampleEstimateSerializer(serializers.Serializer):
    field = FieldSerializer()
    n = serializers.IntegerField(min_value=1)
    statistic = serializers.ChoiceField(choices=["per", "det"])
    target = serializers.CharField()
    trials = serializers.IntegerField(min_value=1)
    hits = serializers.IntegerField(min_value=0)
    estimate = serializers.FloatField(read_only=True)
    standard_error = serializers.FloatField(read_only=True)
    exact = serializers.SerializerMethodField()
    bounds = serializers.SerializerMethodField()
    seed = serializers.IntegerField()
    workers = serializers.IntegerField(min_value=1)
    elapsed_ms = serializers.FloatField()

    def get_exact(self, obj):
        return None if obj.exact is None else str(obj.exact)

    def get_bounds(self, obj):
        return None if obj.bounds is None else [str(b) for b in obj.bounds]


class ThresholdRowSerializer(serializers.Serializer):
    n = serializers.IntegerField()
    i = serializers.IntegerField()
    q = serializers.IntegerField()
    q_any = serializers.IntegerField()
    scan_bound = serializers.IntegerField()


class BoundSetSerializer(serializers.Serializer):
    """Bound polynomials as coefficient lists"""

    n = serializers.IntegerField()
    L = IntPolyField()
    U = IntPolyField()
    N0 = IntPolyField(allow_null=True, required=False)
    N1 = IntPolyField(allow_null=True, required=False)


class VerificationReportSerializer(serializers.Serializer):
    name = serializers.CharField()
    field = FieldSerializer()
    n = serializers.IntegerField()
    m = serializers.IntegerField()
    mode = serializers.CharField()
    checked = serializers.IntegerField()
    domain_size = serializers.IntegerField()
    passed = serializers.BooleanField(read_only=True)
    counterexample = serializers.CharField(allow_null=True)
    detail = serializers.CharField(allow_null=True)
    elapsed_ms = serializers.FloatField()
    workers = serializers.IntegerField()
    seed = serializers.IntegerField(allow_null=True)


def render_json(data):
    """UTF-8 JSON text of serializer output"""
    return JSONRenderer().render(data, renderer_context={"indent": 2}).decode("utf-8")
