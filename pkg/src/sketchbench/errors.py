"""Exception types shared across the toolkit."""


class SketchError(Exception):
    """Base class for all sketchbench errors."""


class InvalidParameterError(SketchError, ValueError):
    """A numeric parameter is outside its admissible range."""


class ShapeError(SketchError, ValueError):
    """Operand dimensions do not agree."""


class SingularMatrixError(SketchError, ValueError):
    """A matrix that must be invertible (full column rank) is not."""


class MatrixFormatError(SketchError, ValueError):
    """A matrix/index file could not be parsed."""


class NotFittedError(SketchError, RuntimeError):
    """A model was used before being trained."""
