"""
Exception hierarchy shared by the library and the command-line entry point.

Errors that end a CLI command carry the process exit code they map to.
"""


class TocqError(Exception):
    """Base class for errors that terminate a command with a specific exit code."""

    exit_code = 1


class ConfigError(TocqError):
    """Run configuration is malformed, has unknown keys or violates an invariant."""

    exit_code = 1


class UnsupportedAnalyticalCaseError(TocqError):
    """The closed-form partition only exists for one band and the EE utility."""

    exit_code = 2


class FingerprintMismatchError(TocqError):
    """A dataset file was generated for a different scenario or decision set."""

    exit_code = 3


class TrainingDivergedError(TocqError):
    """Training produced a non-finite loss."""

    exit_code = 4


class DimensionError(ValueError):
    """Vector lengths disagree with the scenario band count or with each other."""


class DegenerateScenarioError(ValueError):
    """The reference utility u*(g) vanished, so the relative loss is undefined."""
