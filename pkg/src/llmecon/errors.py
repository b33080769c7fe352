"""Exception types shared across the toolkit.

Three failure families, mapped to distinct CLI exit codes and HTTP statuses:
configuration problems (bad files, missing catalog fields), mathematical
domain violations (out-of-range probabilities, non-terminating processes),
and transport failures when talking to a remote judge.
"""


class ConfigError(ValueError):
    """A document, catalog, or scenario is malformed or inconsistent."""


class DomainError(ValueError):
    """An operation was asked to evaluate outside its mathematical domain."""


class TransportError(RuntimeError):
    """A remote judge call failed after exhausting its retry budget."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts
