"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class TiltsheafError(Exception):
    """Base class for every error raised by the library."""


class InputError(TiltsheafError, ValueError):
    """Raised for malformed documents: wrong types, missing keys, bad JSON."""


class CurveError(TiltsheafError, ValueError):
    """Raised when curve invariants are inconsistent."""


class LatticeError(TiltsheafError, ValueError):
    """Raised for invalid Grothendieck-lattice operations."""


class TubeError(TiltsheafError, ValueError):
    """Raised for tube coordinates outside the numeric scope."""


class BranchError(TiltsheafError, ValueError):
    """Raised for invalid branch data."""


class ClassificationError(TiltsheafError, ValueError):
    """Raised when a classification request is outside the supported range."""


class CopresentationError(TiltsheafError, ValueError):
    """Raised when a rewriting step or coverage check fails."""
