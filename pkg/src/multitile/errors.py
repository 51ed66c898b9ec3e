"""Exception types raised across the package."""


class MultiTileError(ValueError):
    """Base class for every error raised by multitile."""


class DimensionMismatch(MultiTileError):
    pass


class NotOrthogonal(MultiTileError):
    """A lattice generator has a component along the subspace H."""


class DegenerateLattice(MultiTileError):
    """Generators are linearly dependent."""


class NotFullRank(MultiTileError):
    """The dual group is not discrete (rank(Gamma) + dim(H) < d)."""


class BadSpec(MultiTileError):
    pass


class NotInGroup(MultiTileError):
    """A translation field produced a vector outside the subgroup."""


class OverlappingComponents(MultiTileError):
    """Two translated point clouds collide.

    ``pair`` holds ``(j, node_j, k, node_k)`` for the first offending
    collision found.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class SizeMismatch(MultiTileError):
    pass


class BoundViolation(MultiTileError):
    """A bound that must hold analytically failed numerically."""


class PreconditionViolation(MultiTileError):
    pass


class SearchFailed(MultiTileError):
    """No admissible vector was found; carries the probes that were tried."""

    def __init__(self, message, probes=None, case=None):
        super().__init__(message)
        self.probes = list(probes or [])
        self.case = case


class CollidingTranslates(MultiTileError):
    pass


class DuplicateFrequency(MultiTileError):
    pass


class UnknownScenario(MultiTileError):
    pass


class BadParams(MultiTileError):
    pass


class ParseError(MultiTileError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PipelineError(MultiTileError):
    """Wraps an error raised inside a pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
