"""Exception types shared across the toolkit."""


class DialkitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(DialkitError, ValueError):
    """A numeric argument lies outside its valid domain."""


class VariantMismatchError(DialkitError, TypeError):
    """Two dial states of different kinds (clock vs gauge) were combined."""


class CalibrationMismatchError(DialkitError, ValueError):
    """Two gauge states do not share the same calibration."""


class EmptyBatchError(DialkitError, ValueError):
    """A batch operation received zero items."""


class DimensionMismatchError(DialkitError, ValueError):
    """Vectors in one batch do not share a common dimension."""


class EmptyGroupError(DialkitError, ValueError):
    """Group normalization received an empty reward group."""


class StyleError(DialkitError, ValueError):
    """A style configuration describes degenerate dial geometry."""


class ConfigError(DialkitError, ValueError):
    """A run configuration is invalid or inconsistent."""


class MetadataError(DialkitError, ValueError):
    """A sample record is missing metadata required by an operation."""


class ManifestError(DialkitError, ValueError):
    """A manifest or JSONL data file is malformed."""


class UnknownIdError(DialkitError, KeyError):
    """A prediction or embedding id does not appear in the manifest."""


class DuplicateIdError(DialkitError, ValueError):
    """An id occurs more than once where uniqueness is required."""


class SingleClusterError(DialkitError, ValueError):
    """Silhouette needs at least two distinct state clusters."""
