"""Exception hierarchy shared by all modules."""


class JLMError(Exception):
    """Base class for every error raised by jlmeasure."""


class InvalidScalarError(JLMError):
    """A symbolic scalar with zero denominator or mixed powers of pi."""


class DegreeCapError(JLMError):
    """A polynomial exceeded the configured degree cap."""


class EvaluationPoleError(JLMError):
    """Numeric evaluation hit a pole of a rational function."""


class ParseError(JLMError):
    """Text could not be parsed into a symbolic scalar."""


class SpecViolationError(JLMError):
    """A local algebra specification breaks one of its invariants."""


class NotSquareIntegrableError(JLMError):
    """A formal degree was requested for a non discrete-series parameter."""


class NoDiscreteSeriesError(JLMError):
    """SL(2, R) has no holomorphic discrete series for the requested weight."""


class InvalidParameterError(JLMError):
    """A tempered parameter is malformed (wrong rank, bad block, ...)."""


class DivergenceError(JLMError):
    """An infinite product tail does not satisfy the convergence bound."""


class TruncationError(JLMError):
    """The requested tolerance cannot be certified within the prime cap.

    Carries the best value reached and its certified bound.
    """

    def __init__(self, message, value=None, error_bound=None, prime_bound=None):
        super().__init__(message)
        self.value = value
        self.error_bound = error_bound
        self.prime_bound = prime_bound


class InputError(JLMError):
    """Malformed or inconsistent input data."""


class NormalizationError(JLMError):
    """Quantities computed in different Haar normalizations were combined."""


class DomainError(JLMError):
    """An argument lies outside the domain of a density function."""


class ResourceError(JLMError):
    """A brute-force enumeration would exceed its hard size cap."""
