"""Exception types shared across the package."""


class FactGraphError(Exception):
    """Base class for all errors raised by this package."""


class IngestError(FactGraphError):
    """Triple stream could not be read.

    Carries the 1-based line position at which reading failed.
    """

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class TransportError(FactGraphError):
    """Failure talking to a remote service.

    ``retriable`` is True for timeouts / connection problems and False for
    errors the caller should not repeat (bad request, unexpected payload).
    """

    def __init__(self, message: str, retriable: bool):
        super().__init__(message)
        self.retriable = retriable


class ConvergenceError(FactGraphError):
    """Power iteration did not converge within the iteration budget."""

    def __init__(self, message: str, report=None, last_vector=None):
        super().__init__(message)
        self.report = report
        self.last_vector = last_vector


class ExtractionEmptyError(FactGraphError):
    """No triple could be extracted from the input text."""


class TripleParseError(FactGraphError):
    """A triple listing from the language model could not be parsed."""

    def __init__(self, message: str, bad_lines: list[str] | None = None):
        super().__init__(message)
        self.bad_lines = list(bad_lines or [])


class TemplateError(FactGraphError):
    """A prompt template placeholder could not be resolved."""

    def __init__(self, message: str, placeholder: str | None = None):
        super().__init__(message)
        self.placeholder = placeholder


class MockExhaustedError(FactGraphError):
    """The mock transcript ran out of canned responses."""


class ConfigError(FactGraphError):
    """Invalid configuration file or option value."""
