"""Exception types shared across the package."""


class OneMatchError(Exception):
    """Base class for every failure this package signals."""


class SingularAffine(OneMatchError):
    """The 2x2 local affine transform is not invertible."""


class DegenerateResidual(OneMatchError):
    """Residual undefined (e.g. both points sit at the epipoles)."""


class PointAtInfinity(OneMatchError):
    """A mapped homogeneous point has a vanishing third coordinate."""


class CheiralityFailure(OneMatchError):
    """No pose candidate places the sample point in front of both cameras."""


class NoRealRoots(OneMatchError):
    """The solver polynomial has no real roots; hypothesis rejected."""


class DegenerateKernel(OneMatchError):
    """The null space of the hidden-variable matrix is not one-dimensional."""


class RankDeficientSystem(OneMatchError):
    """A linear system required to have full column rank does not."""


class DegenerateConfiguration(OneMatchError):
    """Input configuration is degenerate for the requested fit."""


class PoolExhausted(OneMatchError):
    """All candidate matches have already been sampled."""


class NoModelFound(OneMatchError):
    """Estimation finished without a model supported by enough matches."""


class GenerationFailure(OneMatchError):
    """Synthetic scene sampling could not satisfy the visibility constraints."""


class GrazingPlane(OneMatchError):
    """Tangent plane is too close to containing a viewing ray."""


class EmptyInput(OneMatchError):
    """An operation that needs at least one element received none."""


class FileFormatError(OneMatchError):
    """Malformed input file; carries the 1-based offending line number."""

    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
