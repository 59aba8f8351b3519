"""Exception hierarchy shared across the package."""


class TopCertError(Exception):
    pass


class UsageError(TopCertError, ValueError):
    """Caller passed arguments outside an operation's domain."""


class ContractError(TopCertError, ValueError):
    """A documented precondition was violated (e.g. applying an inapplicable action)."""


class ParseError(TopCertError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedFeatureError(ParseError):
    pass


class ResourceLimitError(TopCertError, RuntimeError):
    """A node limit or task-size ceiling was hit; results would be incomplete."""


class InvalidPlan(TopCertError, ValueError):
    """An action sequence is not a plan.

    ``step`` is the index of the first failing step (``len(steps)`` when the
    final state misses the goal) and ``reason`` is one of ``"inapplicable"``
    or ``"goal"``.
    """

    def __init__(self, step, reason, message=None):
        self.step = step
        self.reason = reason
        super().__init__(message or f"step {step}: {reason}")


class PlanForbidden(InvalidPlan):
    """Raised by forward mapping when the lifted sequence is not a plan of the transformed task."""
