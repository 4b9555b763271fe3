"""Exception hierarchy shared across the package.

``DataError`` covers everything caused by bad or insufficient input; the CLI
maps it to exit code 2. ``InvariantViolation`` marks internal consistency
failures (exit code 3).
"""


class TriskelError(Exception):
    """Base class for all package errors."""


class DataError(TriskelError, ValueError):
    """Invalid or insufficient input data."""


class InvariantViolation(TriskelError, RuntimeError):
    """An internal consistency check failed; indicates a bug."""


# geometry
class EmptyInput(DataError):
    pass


class TooFewPoints(DataError):
    pass


class AllCollinear(DataError):
    pass


class DegenerateTriangle(DataError):
    pass


# raster / skeleton
class EmptyMask(DataError):
    pass


class DegenerateShape(DataError):
    pass


class TargetTooSmall(DataError):
    pass


# features
class NoValidTriangles(DataError):
    pass


class EmptyMatrix(DataError):
    pass


# classifier
class EmptyTrainingSet(DataError):
    pass


class EmptyClass(DataError):
    pass


class EmptyTestSet(DataError):
    pass


# corpus / evaluation
class NoClasses(DataError):
    pass


class BadSpec(DataError):
    pass


class SplitInfeasible(DataError):
    pass


class UnusableSample(DataError):
    """A mask produced fewer than 3 skeleton points and cannot be triangulated."""


class StageError(DataError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage: str, source: str, cause: Exception):
        super().__init__(f"{stage} failed for {source}: {cause}")
        self.stage = stage
        self.source = source
        self.cause = cause
