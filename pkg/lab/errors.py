#!/usr/bin/env python3
"""Error types raised by the lab modules and mapped to CLI exit codes."""
from __future__ import annotations


class LabError(RuntimeError):
    """Base error for all lab failures."""

    exit_code = 1


class ConfigError(LabError):
    """Error raised when an experiment configuration is malformed."""

    exit_code = 2


class ResolutionError(LabError, ValueError):
    """Error raised when a scale parameter is below the grid resolution."""

    exit_code = 3


class DomainError(LabError, ValueError):
    """Error raised when an argument lies outside its admissible range."""


class SamplingError(LabError, ValueError):
    """Error raised when too few samples are supplied."""


class AdmissibilityError(LabError, ValueError):
    """Error raised when a jump violates (m+ - m-) . nu = 0."""


class GridMismatchError(LabError, ValueError):
    """Error raised when measures or fields live on different grids."""


class AcceptanceFailure(LabError):
    """Error raised when one or more acceptance criteria fail."""

    exit_code = 4
