# tiling/exceptions.py

from algebra.exceptions import ComputationError


class TilingError(ComputationError):
    default_detail = "Tiling computation failed."
    default_code = "tiling_error"


class InvalidRule(TilingError):
    default_detail = "Substitution rule is structurally inconsistent."
    default_code = "invalid_rule"


class ResourceLimit(TilingError):
    default_detail = "Patch would exceed the configured tile cap."
    default_code = "resource_limit"


class NoSeedFound(TilingError):
    default_detail = "No tile is fixed by a power of the substitution within the search depth."
    default_code = "no_seed_found"


class MissingControlPoints(TilingError):
    default_detail = "Patch has no control points; compute them first."
    default_code = "missing_control_points"


class WindowTooSmall(TilingError):
    default_detail = "Patch is too small for the requested window."
    default_code = "window_too_small"


class RenderUnsupported(TilingError):
    default_detail = "Only patches of dimension one or two can be rendered."
    default_code = "render_unsupported"
