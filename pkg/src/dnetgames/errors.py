"""Exception hierarchy shared by all modules."""


class NetGameError(Exception):
    """Base class for library errors."""


class DomainError(NetGameError, ValueError):
    """Argument of the logarithmic benefit is outside its domain."""


class SizeError(NetGameError, ValueError):
    """Problem too large for an exhaustive routine."""


class IndeterminateError(NetGameError):
    """Spectral radius too close to 1 to decide a classification."""


class ConvergenceError(NetGameError, RuntimeError):
    """Iteration budget exhausted."""


class ConfigurationError(NetGameError, ValueError):
    """Inconsistent options."""


class PreconditionError(NetGameError, ValueError):
    """A documented precondition does not hold."""


class WitnessError(PreconditionError):
    """A scaling vector does not certify the property it is claimed to."""


class ParseError(NetGameError, ValueError):
    """Malformed input document."""
