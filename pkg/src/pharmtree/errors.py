"""Error types shared across the package."""

from __future__ import annotations


class ParseError(ValueError):
    """Raised when a SMILES/SMARTS string cannot be parsed."""


class SanitizeError(ValueError):
    """Raised when a structure violates valence or aromaticity rules."""

__all__ = [
    "ParseError",
    "SanitizeError",
    "LengthMismatch",
    "EmbedFailure",
    "EmptyPharmacophore",
    "DuplicateEntry",
    "EmptyCatalog",
    "ArityMismatch",
    "NoProduct",
    "SamplingExhausted",
    "ReplayMismatch",
    "ShapeMismatch",
    "ZeroVector",
    "DivergenceError",
    "ChecksumError",
    "UnsupportedVersion",
    "DeadEnd",
    "ExtinctPopulation",
    "UnknownBlock",
    "ExternalToolMissing",
    "ToolFailure",
]


class LengthMismatch(ValueError):
    """Two fixed-length vectors of different lengths were combined."""


class EmbedFailure(RuntimeError):
    """3D embedding of a molecule failed."""


class EmptyPharmacophore(ValueError):
    """A molecule produced zero pharmacophore features."""


class DuplicateEntry(ValueError):
    """A catalog or template file contains a repeated id."""


class EmptyCatalog(ValueError):
    """A catalog or template file contains no entries."""


class ArityMismatch(ValueError):
    """A reaction was applied with the wrong number of reactants."""


class NoProduct(RuntimeError):
    """A reaction template matched no reactant arrangement."""


class SamplingExhausted(RuntimeError):
    """Random tree sampling ran out of retries."""


class ReplayMismatch(RuntimeError):
    """Replaying a synthetic tree did not reproduce its recorded products."""


class ShapeMismatch(ValueError):
    """A tensor had an unexpected shape."""


class ZeroVector(ValueError):
    """A vector that must be nonzero (for cosine scoring) was all zeros."""


class DivergenceError(RuntimeError):
    """Training loss became non-finite."""


class ChecksumError(RuntimeError):
    """A checkpoint failed its integrity check."""


class UnsupportedVersion(RuntimeError):
    """A checkpoint has a version this code cannot read."""


class DeadEnd(RuntimeError):
    """Decoding reached a state with no applicable continuation."""


class ExtinctPopulation(RuntimeError):
    """A GA cycle eliminated every candidate."""


class UnknownBlock(KeyError):
    """A building-block id is absent from the catalog."""


class ExternalToolMissing(RuntimeError):
    """A required external binary was not found on PATH."""


class ToolFailure(RuntimeError):
    """An external tool exited with an error."""
