"""Exception hierarchy for the voting power engine.

Every error carries a machine-readable ``category`` and the process exit
code the command-line front end uses when the error escapes a command.
"""

from __future__ import annotations


class VotingPowerError(ValueError):
    """Base class for all engine errors."""

    category = "error"
    exit_code = 1


class StructureError(VotingPowerError):
    """Invalid measure or voting system data (masses, overlaps, quota, family)."""

    category = "structure"
    exit_code = 3


class SymmetryError(VotingPowerError):
    """Measure is not reflection symmetric where a voting measure is required."""

    category = "symmetry"
    exit_code = 4


class DomainError(VotingPowerError):
    """Argument outside the mathematical domain of an operation."""

    category = "domain"
    exit_code = 5


class ResourceError(VotingPowerError):
    """Exact computation would exceed the configured state budget."""

    category = "resource"
    exit_code = 6


class CapExceededError(VotingPowerError):
    """Voter count above a hard cap (brute force, explicit families, unit DP)."""

    category = "cap"
    exit_code = 7


class ParseError(VotingPowerError):
    """Malformed input document, rational literal or setting."""

    category = "parse"
    exit_code = 2


class ValidationFailure(VotingPowerError):
    """A self-consistency check failed."""

    category = "validation"
    exit_code = 1
