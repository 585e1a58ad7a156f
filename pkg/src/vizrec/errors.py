"""Exception types shared across the engine."""


class VizrecError(Exception):
    """Base class for all engine errors."""


class MalformedXml(VizrecError):
    """Workbook file could not be parsed as XML."""


class UnsupportedSchema(VizrecError):
    """XML parsed but the root element is not a recognized workbook."""


class IoError(VizrecError):
    """A repository root or data file could not be read."""


class UnknownSheet(VizrecError):
    """Requested sheet name does not exist in the workbook."""


class EmptyCorpus(VizrecError):
    """An operation requiring at least one document got none."""


class InvalidK(VizrecError):
    """Topic/dimension count outside the supported range."""


class RankTooLarge(VizrecError):
    """Requested SVD rank exceeds min(#docs, vocabulary size)."""


class EmptyDocument(VizrecError):
    """Document has no usable (in-vocabulary) tokens."""


class DimensionMismatch(VizrecError):
    """Vector or distribution operands have different dimensions."""


class ZeroVector(VizrecError):
    """Cosine similarity is undefined for an all-zero vector."""


class NoKnownTokens(VizrecError):
    """Every token of the document is missing from the word-vector table."""


class InsufficientCorpus(VizrecError):
    """Triplet sampling constraints cannot be satisfied for the requested count."""


class ScoringFailure(VizrecError):
    """A model scorer failed on a triplet; carries the triplet id."""


class DegenerateInput(VizrecError):
    """Input violates a statistical precondition (bad choices, unequal rater
    counts, mismatched signature seeds)."""


class ConfigError(VizrecError):
    """Run configuration file is malformed or violates a constraint."""


class UnknownWorkbook(VizrecError):
    """Workbook id not present in the index bundle."""


class UnknownFacet(VizrecError):
    """Facet name not one of related / versions / similar-data."""


class BindFailure(VizrecError):
    """HTTP service could not bind to the requested address."""


class BundleFormatError(VizrecError):
    """Index bundle or binary container is missing, corrupt, or wrong version."""
