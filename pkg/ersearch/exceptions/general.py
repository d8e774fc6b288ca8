import logging


class BaseError(Exception):
    """Base class for all errors raised by the retrieval engine."""
    logger = logging.getLogger(__name__)
    code = 1
    message = "Retrieval engine error."

    def __init__(self, code, message, data=None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.data = data

        # pylint: disable=W1203
        self.logger.error(f"Error {code}: {message}. Data: {data}")

    def __str__(self):
        if self.data is None:
            return self.message
        return f"{self.message} {self.data}"


class ConfigError(BaseError):
    """Invalid configuration value or model/scorer combination."""
    code = 3
    message = "Invalid configuration."

    def __init__(self, data=None):
        super().__init__(self.code, self.message, data)


# Corpus Errors

class CorpusError(BaseError):
    """Base class for corpus loading errors."""
    code = 4
    message = "Corpus error."

    def __init__(self, data=None):
        super().__init__(self.code, self.message, data)


class MissingCorpusError(CorpusError):
    """The corpus file does not exist."""
    message = "Corpus file not found."


class MalformedRecordError(CorpusError):
    """A corpus line is not a valid document record."""
    message = "Malformed document record."


class DuplicateDocumentError(CorpusError):
    """Two records share the same doc_id."""
    message = "Duplicate doc_id."


class MentionSpanError(CorpusError):
    """A mention span lies outside the text or disagrees with its surface."""
    message = "Invalid mention span."


class OverlappingMentionError(CorpusError):
    """Two mentions of one document overlap."""
    message = "Overlapping mentions."


# Index Errors

class IndexStoreError(BaseError):
    """Base class for index errors."""
    code = 5
    message = "Index error."

    def __init__(self, data=None):
        super().__init__(self.code, self.message, data)


class IndexNotFoundError(IndexStoreError):
    """No index snapshot at the configured location."""
    message = "Index not found."


class IndexFormatError(IndexStoreError):
    """The index snapshot is unreadable or of another version."""
    message = "Unsupported index snapshot."


class UnknownKeyError(IndexStoreError):
    """The requested meta-document key does not exist."""
    message = "Unknown index key."


# Query Errors

class QueryError(BaseError):
    """Base class for E-R query errors."""
    code = 6
    message = "Invalid E-R query."

    def __init__(self, data=None):
        super().__init__(self.code, self.message, data)


class EvenLengthError(QueryError):
    """The number of sub-queries is even or zero."""
    message = "E-R query must have an odd number of sub-queries."


class NonAlternatingError(QueryError):
    """Sub-query kinds do not alternate entity, relationship, entity."""
    message = "Sub-queries must alternate entity and relationship kinds."


class EmptyTermsError(QueryError):
    """A sub-query has no terms after tokenization."""
    message = "Sub-query has no terms."
