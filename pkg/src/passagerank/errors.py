"""Exception types shared across the package."""


class PassageRankError(Exception):
    """Base class for all package errors."""


class ConfigError(PassageRankError):
    """Bad or unreadable configuration (raised at construction, not at use)."""


class DataError(PassageRankError):
    """Malformed or inconsistent input data (corpus, qrels, run files)."""


class IndexFormatError(DataError):
    """Index file is corrupt, truncated, or has an unsupported version."""


class ScorerError(PassageRankError):
    """A scorer failed or returned an invalid response."""

    def __init__(self, scorer: str, message: str):
        super().__init__(f"scorer '{scorer}': {message}")
        self.scorer = scorer
