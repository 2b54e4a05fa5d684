"""Exception hierarchy shared across the package.

Exit-code mapping lives in the CLI: ConfigError -> 2, OverlapError -> 3,
any other MedvlmError (or unexpected exception) -> 1.
"""


class MedvlmError(Exception):
    """Base class for all package errors."""


class ConfigError(MedvlmError):
    """Invalid or inconsistent user-supplied configuration."""


class DataError(MedvlmError):
    """Malformed input data (corpora, qrels, benchmark files)."""


class CheckpointError(MedvlmError):
    """Unreadable or inconsistent checkpoint payload."""


class EndpointError(MedvlmError):
    """Chat endpoint failed after exhausting retries."""


class ExtractionError(MedvlmError):
    """Raised internally when no extraction rule matches; callers record null."""


class OverlapError(MedvlmError):
    """Benchmark/train overlap detected by the contamination checker."""


class LockError(MedvlmError):
    """An output directory is already locked by a live run."""


class TrainingDivergedError(MedvlmError):
    """Loss became non-finite during training."""
