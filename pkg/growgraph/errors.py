"""
Exception hierarchy for growgraph
"""


class GrowGraphError(ValueError):
    """Base class for every error raised by the library."""


class InvalidInputError(GrowGraphError):
    """Bad parameters, malformed files, unknown names."""


class CostGuardError(GrowGraphError):
    """A size guard refused an exponential or quadratic computation."""


class OracleCapError(CostGuardError):
    """Exact enumeration requested above the oracle vertex cap."""
