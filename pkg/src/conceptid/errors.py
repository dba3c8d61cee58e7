"""Exception types shared across the package."""


class ConceptIdError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(ConceptIdError):
    """A file or configuration does not match the expected structure."""


class ParseError(ConceptIdError):
    """A cell or record could not be parsed into a finite number."""


class EmptyDataError(ConceptIdError):
    """A data source yielded no samples."""


class ConfigError(ConceptIdError):
    """A parameter value is outside its documented domain."""


class UndefinedMetricError(ConceptIdError):
    """A metric is undefined for the given input (e.g. fewer than two clusters)."""


class ObjectiveError(ConceptIdError):
    """An objective function raised during an optimization run."""

    def __init__(self, generation: int, cause: BaseException):
        super().__init__(f"objective evaluation failed at generation {generation}: {cause!r}")
        self.generation = generation
