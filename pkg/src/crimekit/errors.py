"""Exception types shared across the toolkit."""


class CrimekitError(Exception):
    """Base class for all toolkit errors."""


class UnrecognizedSchema(CrimekitError):
    """No registered source signature matches the CSV header."""


class AmbiguousSchema(CrimekitError):
    """More than one registered source signature matches the CSV header."""


class MalformedValue(CrimekitError):
    """A field failed to parse under its source's declared format.

    Rows raising this are quarantined with ``reason``, never silently dropped.
    """

    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


class EmptyDataset(CrimekitError):
    """Operation requires a non-empty dataset."""


class DuplicatePriority(CrimekitError):
    """Two crime-type rules share the same priority rank."""


class UnknownAttribute(CrimekitError):
    """Requested grouping key is not an article attribute."""


class EmptyVocabulary(CrimekitError):
    """Document-frequency pruning removed every candidate term."""


class UnknownTerm(CrimekitError):
    """Term is not part of the fitted vocabulary."""


class KTooLarge(CrimekitError):
    """Requested more clusters than there are data points."""


class EmptyCorpus(CrimekitError):
    """No tokens left to model after preprocessing."""


class EmptyInput(CrimekitError):
    """Statistic requested over an empty value list."""


class DegenerateData(CrimekitError):
    """Data has zero total variance; no principal axes exist."""


class MissingStageOutput(CrimekitError):
    """A report section's backing stage output file is absent."""


class ConfigError(CrimekitError):
    """Pipeline configuration failed validation."""


class StageFailure(CrimekitError):
    """A pipeline stage aborted; partial outputs are retained."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
