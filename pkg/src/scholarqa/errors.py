"""Exception hierarchy shared across the package."""


class ScholarQaError(Exception):
    """Base class for all errors raised by this package."""


class MalformedQueryError(ScholarQaError):
    """Query curation produced no usable keywords."""


class ProviderError(ScholarQaError):
    """Model provider failed (auth, quota, transport after retries)."""


class EmptyReplyError(ProviderError):
    """Provider returned an empty chat reply."""


class DimensionMismatchError(ProviderError):
    """Embedding length is inconsistent with earlier vectors for the same model."""


class TransportError(ScholarQaError):
    """HTTP/network failure talking to the metadata API, after retries."""


class ApiError(ScholarQaError):
    """Metadata API returned a non-success status.

    The response body is preserved for diagnostics.
    """

    def __init__(self, status_code: int, body: str = ""):
        super().__init__(f"API returned status {status_code}")
        self.status_code = status_code
        self.body = body


class NoAbstractsError(ScholarQaError):
    """Retrieval yielded zero records with a usable abstract."""


class StorageError(ScholarQaError):
    """Cache entry is corrupt or unreadable."""


class MalformedXmlError(ScholarQaError):
    """Abstract fragment could not be parsed even leniently."""


class EmptyContextError(ScholarQaError):
    """No paper fits within the prompt context budget."""


class CitationIntegrityError(ScholarQaError):
    """Strict mode: the answer cited a URL outside the supplied papers."""


class EmptyInputError(ScholarQaError):
    """Statistics requested over an empty score list."""


class DatasetFormatError(ScholarQaError):
    """Evaluation dataset line failed to parse."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class PipelineError(ScholarQaError):
    """A pipeline stage failed without recovery; tagged with the stage name."""

    def __init__(self, stage: str, cause: Exception, trace=None):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.trace = trace
