"""Exception taxonomy mapped onto CLI exit codes (see cli.main)."""
from __future__ import annotations

__all__ = ["LandskewError", "DataError", "SizeCapError", "NumericalError"]


class LandskewError(Exception):
    """Base class for all package errors."""


class DataError(LandskewError):
    """Malformed, inconsistent, or out-of-contract input data (exit code 3)."""


class SizeCapError(DataError):
    """Input exceeds a documented size cap; subsample before retrying."""


class NumericalError(LandskewError):
    """A numerical routine failed to produce a usable result (exit code 4)."""
