"""Shared exception types."""


class QwlabError(Exception):
    """Base class for all package errors."""


class InputError(QwlabError, ValueError):
    """Invalid argument, malformed instance, or violated precondition."""


class BudgetError(InputError):
    """A dense-computation size budget was exceeded."""


class ChainNotErgodicError(InputError):
    """Operation requires an irreducible, aperiodic chain."""


class PromiseViolationError(InputError):
    """A promised structural property of the instance does not hold."""


class InvariantViolationError(QwlabError, RuntimeError):
    """A computed quantity broke an internal consistency guarantee."""
