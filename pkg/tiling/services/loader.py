# tiling/services/loader.py

import json
import logging
from functools import reduce
from pathlib import Path

from django.apps import apps
from rest_framework import serializers

from tiling.models import SubstitutionRule
from tiling.serializers import TilingSpecSerializer
from tiling.services.substitution import SubstitutionService

logger = logging.getLogger(__name__)


class RuleLoader:
    """Reads tiling spec files, including {"direct_product": [file, file, ...]}."""

    @staticmethod
    def fixture_path(name: str) -> Path:
        return Path(apps.get_app_config("tiling").path) / "fixtures" / name

    @classmethod
    def load_fixture(cls, name: str) -> SubstitutionRule:
        return cls.load(cls.fixture_path(name))

    @classmethod
    def load(cls, path) -> SubstitutionRule:
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise serializers.ValidationError(f"{path.name}: {exc}")

        if isinstance(data, dict) and "direct_product" in data:
            parts = data["direct_product"]
            if not isinstance(parts, list) or len(parts) < 2:
                raise serializers.ValidationError({"direct_product": "Expected a list of at least two files."})
            factors = [cls.load(path.parent / part) for part in parts]
            logger.info(f"{path.name}: direct product of {len(factors)} rules")
            return reduce(SubstitutionService.direct_product, factors)

        if isinstance(data, dict):
            data.setdefault("name", path.stem)
        serializer = TilingSpecSerializer(data=data)
        serializer.is_valid(raise_exception=True)
        return serializer.save()
