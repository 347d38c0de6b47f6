"""Exception hierarchy shared by every gridcover module."""


class GridCoverError(Exception):
    """Base class for all library errors."""


class GridError(GridCoverError, ValueError):
    pass


class MissingOrigin(GridError):
    pass


class TooSmall(GridError):
    pass


class DuplicateEntry(GridError):
    pass


class GenerationFailed(GridCoverError):
    pass


class SamePoint(GridCoverError, ValueError):
    pass


class NotStandardGrid(GridCoverError, ValueError):
    pass


class NotSquare(GridCoverError, ValueError):
    pass


class DimensionMismatch(GridCoverError, ValueError):
    pass


class HypothesisViolated(GridCoverError, ValueError):
    pass


class DivisibilityViolated(GridCoverError, ValueError):
    pass


class BadParameter(GridCoverError, ValueError):
    pass


class NotGeneric(GridCoverError, ValueError):
    pass


class DeltaTooSmall(GridCoverError, ValueError):
    pass


class BudgetExceeded(GridCoverError):
    pass
