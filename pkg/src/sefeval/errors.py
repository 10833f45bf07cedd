"""Exception hierarchy shared across the package."""


class SefEvalError(Exception):
    """Base class for all sefeval errors."""


class LexiconError(SefEvalError):
    """Malformed or invalid lexicon/cue file."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f" [{path}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + where)


class DatasetError(SefEvalError):
    """Dataset file violates the ingestion schema."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f" [{path}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + where)


class PromptError(SefEvalError):
    """Invalid prompt construction request."""


class MissingBindingError(PromptError):
    """A stage referenced a binding that was not supplied."""


class EndpointError(SefEvalError):
    """Problem talking to the inference endpoint."""


class TransportFailure(EndpointError):
    """Retries exhausted against the endpoint."""


class MalformedResponseError(EndpointError):
    """Endpoint replied with an unparseable payload."""


class ReplayMissError(EndpointError):
    """Replay transcript has no entry for the requested prompt."""


class AnalyticsError(SefEvalError):
    """Degenerate or inconsistent input to an analytics computation."""
