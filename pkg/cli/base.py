# cli/base.py

import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from django.test.utils import override_settings
from rest_framework import serializers

from algebra.exceptions import CertificationFailed, ComputationError, Undecidable
from cli.exceptions import InvalidRunConfig
from cli.models import RunConfig
from cli.renderers import CanonicalJSONRenderer
from tiling.exceptions import InvalidRule, RenderUnsupported
from tiling.models import SubstitutionRule
from tiling.services.loader import RuleLoader

logger = logging.getLogger(__name__)

OK, INTERNAL, PARSE, UNDECIDABLE, INVALID_RULE, RENDER = range(6)

RETURN_CODES = (
    (InvalidRunConfig, PARSE),
    (Undecidable, UNDECIDABLE),
    (CertificationFailed, UNDECIDABLE),
    (InvalidRule, INVALID_RULE),
    (RenderUnsupported, RENDER),
)


def return_code(exc: ComputationError) -> int:
    for error, code in RETURN_CODES:
        if isinstance(exc, error):
            return code
    return INTERNAL


class ToolkitCommand(BaseCommand):
    """
    Shared flags and error handling. Subclasses implement ``run`` and write
    reports through ``emit``; every failure leaves as a CommandError carrying
    the exit code.
    """

    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("--precision", type=float, help="Root certification precision")
        parser.add_argument("--tile-cap", type=int, dest="tile_cap", help="Largest patch ever generated")
        parser.add_argument("--out", help="Directory receiving report files")
        parser.add_argument("--seed-tile", type=int, dest="seed_tile", help="Prototile label to start from")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, config: RunConfig, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            config = RunConfig.from_options(options)
            with override_settings(**config.overrides()):
                self.run(config, **options)
        except CommandError:
            raise
        except serializers.ValidationError as exc:
            raise CommandError(f"Parse error: {exc.detail}", returncode=PARSE)
        except ComputationError as exc:
            raise CommandError(f"{exc.get_codes()}: {exc.detail}", returncode=return_code(exc))
        except OSError as exc:
            raise CommandError(str(exc), returncode=INTERNAL)

    def load_rule(self, config: RunConfig, path: str) -> SubstitutionRule:
        rule = RuleLoader.load(path)
        config.check_rule(rule)
        return rule

    @staticmethod
    def read_json(path: str):
        try:
            return json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise serializers.ValidationError(f"{path}: {exc}")

    @staticmethod
    def render(data) -> str:
        return CanonicalJSONRenderer().render(data).decode("utf-8")

    def emit(self, config: RunConfig, data, filename: str) -> str:
        text = self.render(data)
        self.stdout.write(text)
        self.write(config, filename, text + "\n")
        return text

    @staticmethod
    def write(config: RunConfig, filename: str, content) -> None:
        if config.out_dir is None:
            return
        target = config.out_dir / filename
        if isinstance(content, bytes):
            target.write_bytes(content)
        else:
            target.write_text(content)
        logger.info(f"Wrote {target}")
