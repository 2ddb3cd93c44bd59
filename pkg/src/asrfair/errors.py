"""Exception types shared across the toolkit."""


class AsrFairError(Exception):
    """Base class for all toolkit errors."""


class ManifestFormatError(AsrFairError):
    """A manifest file could not be parsed (bad header, row, or literal)."""


class ManifestInvariantError(AsrFairError):
    """A record violates manifest invariants (strict loading only)."""


class InfeasibleSplitError(AsrFairError):
    """A speaker-disjoint split cannot satisfy the requested fractions."""


class EmptyReferenceError(AsrFairError):
    """An error rate was requested against an empty reference."""


class PerUnavailableError(AsrFairError):
    """Phoneme-level scoring requested without phoneme references."""


class AudioFormatError(AsrFairError):
    """Audio file is unreadable, non-mono, or not 16-bit PCM."""


class HypothesisFormatError(AsrFairError):
    """A hypothesis file could not be parsed."""
