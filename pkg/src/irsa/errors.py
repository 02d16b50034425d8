"""Exception hierarchy shared across the package."""


class IrsaError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(IrsaError):
    """A domain object violates one of its invariants."""


class NormalizationError(ValidationError):
    """Probability mass does not sum to one."""


class NegativeCoefficientError(ValidationError):
    """A probability coefficient is negative."""


class ZeroDegreeError(ValidationError):
    """A degree distribution assigns mass to degree zero."""


class DomainError(IrsaError):
    """An argument lies outside the mathematically valid domain."""


class NumericInstabilityError(IrsaError):
    """A numerical routine lost too much precision to be trusted."""


class EmptySystemError(IrsaError):
    """An operation requires at least one transmitting source."""


class BracketError(IrsaError):
    """A bisection bracket does not enclose the sought threshold."""


class ConfigError(ValidationError):
    """A scenario or experiment configuration is inconsistent."""


class ConfigParseError(ConfigError):
    """An experiment configuration file could not be parsed."""


class PriorityViolationError(IrsaError):
    """A distribution assignment breaks the priority (dominance) constraint."""


class InfeasibleError(IrsaError):
    """No candidate satisfies the optimization constraints."""
