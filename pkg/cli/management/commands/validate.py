# cli/management/commands/validate.py

import logging

from django.core.management.base import CommandError

from cli.base import INVALID_RULE, ToolkitCommand
from tiling.serializers import ValidationReportSerializer
from tiling.services.substitution import SubstitutionService

logger = logging.getLogger(__name__)


class Command(ToolkitCommand):
    help = "Check volume, containment and overlap of a tiling spec file"

    def add_command_arguments(self, parser):
        parser.add_argument("spec_file")

    def run(self, config, **options):
        rule = self.load_rule(config, options["spec_file"])
        report = SubstitutionService.validate_rule(rule)
        self.emit(config, ValidationReportSerializer(report).data, "validation.json")
        if not report.valid:
            logger.warning(f"{rule.name}: {len(report.violations)} violation(s)")
            raise CommandError(f"{rule.name} is not a valid substitution.", returncode=INVALID_RULE)
