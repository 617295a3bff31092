"""CLI subcommands; each module registers its parsers on the shared subparser set."""

from src.commands import (
    action_command,
    classify_command,
    kernel_command,
    observables_command,
    sea_command,
    sweep_command,
)

COMMAND_MODULES = (
    classify_command,
    action_command,
    observables_command,
    kernel_command,
    sea_command,
    sweep_command,
)

__all__ = ["COMMAND_MODULES"]
