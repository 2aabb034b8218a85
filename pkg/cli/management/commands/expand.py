# cli/management/commands/expand.py

import numpy as np
from django.core.management.base import CommandError

from cli.base import INVALID_RULE, ToolkitCommand
from cli.renderers import PatchSVGRenderer
from tiling.exceptions import RenderUnsupported
from tiling.models import TilingPatch
from tiling.serializers import PatchSerializer, ValidationReportSerializer
from tiling.services.geometry import ControlPointService
from tiling.services.substitution import SubstitutionService


class Command(ToolkitCommand):
    help = "Apply the substitution k times to one prototile and print the patch"

    def add_command_arguments(self, parser):
        parser.add_argument("spec_file")
        parser.add_argument("--k", type=int, default=1)
        parser.add_argument("--render", help="SVG file to draw the patch into (dimension 1 or 2)")
        parser.add_argument("--control-points", action="store_true", dest="control_points")

    def run(self, config, **options):
        rule = self.load_rule(config, options["spec_file"])
        report = SubstitutionService.validate_rule(rule)
        if not report.valid:
            self.stderr.write(self.render(ValidationReportSerializer(report).data))
            raise CommandError(f"{rule.name} is not a valid substitution.", returncode=INVALID_RULE)
        if options["render"] and rule.d > 2:
            raise RenderUnsupported(f"Cannot render a patch of dimension {rule.d}.")

        seed = TilingPatch.single(config.seed_tile or 1, np.zeros(rule.d))
        patch = SubstitutionService.expand(rule, seed, options["k"])
        if options["control_points"]:
            patch = ControlPointService.control_points(rule, patch)
        self.emit(config, PatchSerializer(patch).data, "patch.json")

        if options["render"]:
            with open(options["render"], "wb") as handle:
                handle.write(PatchSVGRenderer().render({"rule": rule, "patch": patch}))
