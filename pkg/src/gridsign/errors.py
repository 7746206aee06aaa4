"""Shared exception types."""


class CapacityError(Exception):
    """Requested problem size exceeds a configured enumeration or DP cap."""


class DegenerateNoiseError(ValueError):
    """Noise rate hits a value where the likelihood weight is undefined.

    Raised by gamma() for p in {0, 1/2} and q = 0: the caller should switch
    to a hard-constraint or edge-only formulation instead.
    """
