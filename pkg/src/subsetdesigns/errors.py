"""Exception hierarchy shared by every module."""


class SubsetDesignError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpecError(SubsetDesignError, ValueError):
    """A group, curve or element specification could not be parsed or is malformed."""


class DomainError(SubsetDesignError, ValueError):
    """An argument lies outside the domain of the operation."""


class InconsistentParametersError(SubsetDesignError, ValueError):
    """Design parameters fail an exact-divisibility identity."""


class InapplicableError(SubsetDesignError, ValueError):
    """The hypotheses of a decision rule are not met for this input."""


class ResourceError(SubsetDesignError, RuntimeError):
    """A configured enumeration or memory budget would be exceeded."""


class InvariantViolation(SubsetDesignError, RuntimeError):
    """Two independent computations that must agree did not.

    This always signals either a bug or a mathematical surprise and is never
    raised for bad user input.
    """
