"""Exception types shared across the package."""


class TrustpropError(Exception):
    """Base class for all package-specific errors."""


class InvalidGraphSizeError(TrustpropError):
    """A graph builder was asked for fewer nodes than the model permits."""


class GraphGenerationError(TrustpropError):
    """Random graph generation exhausted its retry budget."""

    def __init__(self, attempts: int):
        super().__init__(f"no strongly connected graph after {attempts} attempts")
        self.attempts = attempts


class UndefinedDiameterError(TrustpropError):
    """Diameter requested for a graph that is not strongly connected."""


class ProtocolViolationError(TrustpropError):
    """A per-round message set did not match the agent's in-neighborhood."""


class NotSubstochasticError(TrustpropError):
    """Matrix input has a negative entry or a row summing above one."""


class BoundUndefinedError(TrustpropError):
    """A finite-time bound was requested where it does not exist."""


class DegenerateMarginError(TrustpropError):
    """Observation margins of zero make the tail bounds undefined."""


class ConfigRejectedError(TrustpropError):
    """An experiment configuration failed validation."""


class UnknownPresetError(TrustpropError):
    """Requested experiment preset name is not defined."""
