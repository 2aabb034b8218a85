# cli/management/commands/classify.py

from django.core.management.base import CommandError

from algebra.models import Verdict
from algebra.serializers import ClassificationSerializer, PolynomialFileSerializer
from algebra.services.classification import PisotClassificationService
from cli.base import UNDECIDABLE, ToolkitCommand


class Command(ToolkitCommand):
    help = "Certified roots, Pisot/Perron verdicts and Pisot-family verdicts for a polynomial file"

    def add_command_arguments(self, parser):
        parser.add_argument("poly_file")
        parser.add_argument("--power-sums", type=int, default=10, dest="power_sums")

    def run(self, config, **options):
        serializer = PolynomialFileSerializer(data=self.read_json(options["poly_file"]))
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data

        result = PisotClassificationService.classify(
            data["poly"],
            [[i - 1 for i in selection] for selection in data["selections"]],
            multiplicity=data["multiplicity"],
            precision=config.precision,
            power_sum_count=options["power_sums"],
        )
        self.emit(config, ClassificationSerializer(result).data, "classify.json")

        verdicts = [result["pisot_number"]] + [s["pisot_family"] for s in result["selections"]]
        if Verdict.UNDECIDABLE in verdicts:
            raise CommandError("Undecidable at the requested precision.", returncode=UNDECIDABLE)
