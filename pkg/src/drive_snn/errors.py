"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Array dimensions do not line up."""


class DegenerateBatchError(ValueError):
    """Training-mode batch normalization needs at least two samples."""


class EmptyDatasetError(ValueError):
    """No usable samples were found."""


class UsageError(RuntimeError):
    """An API was called out of order, e.g. backward without a train-mode trace."""


class ModelFormatError(ValueError):
    """A model file is malformed or has an unsupported format version."""
