# cli/exceptions.py

from algebra.exceptions import ComputationError


class CliError(ComputationError):
    default_detail = "Command failed."
    default_code = "cli_error"


class InvalidRunConfig(CliError):
    default_detail = "Run limits must be positive."
    default_code = "invalid_run_config"


class OutputNotWritable(CliError):
    default_detail = "Output directory is not writable."
    default_code = "output_not_writable"
