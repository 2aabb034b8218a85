# cli/management/commands/meyer.py

from rest_framework import serializers

from cli.base import ToolkitCommand
from cli.services.pipeline import MeyerTrendService


def parse_windows(text: str) -> list:
    try:
        windows = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise serializers.ValidationError(f"Windows {text!r} are not a comma-separated list of numbers.")
    if not windows or any(w <= 0 for w in windows):
        raise serializers.ValidationError("Windows must be positive.")
    return windows


class Command(ToolkitCommand):
    help = "Smallest gap of the control-point difference set over growing windows"

    def add_command_arguments(self, parser):
        parser.add_argument("spec_file")
        parser.add_argument("--windows", default="10,20,40,80")

    def run(self, config, **options):
        rule = self.load_rule(config, options["spec_file"])
        result = MeyerTrendService.gap_trend(rule, parse_windows(options["windows"]), config.seed_tile)
        self.emit(config, {
            "rule": rule.name,
            "center": list(result.center),
            "windows": [
                {"window": window, "gap": gap}
                for window, gap in zip(result.windows, result.gaps)
            ],
            "errors": list(result.errors),
            "trend": result.trend,
        }, "meyer.json")
