"""Exception hierarchy for solver and estimation failures."""


class AffposeError(Exception):
    """Base class for all library errors."""


class FrameMismatch(AffposeError):
    """An operation received image coordinates in the wrong frame."""


class DegenerateMotion(AffposeError):
    """Zero baseline or otherwise unobservable relative motion."""


class DegenerateInput(AffposeError):
    """Input configuration leaves the problem underdetermined."""


class NumericalFailure(AffposeError):
    """A numerical routine (eigen/SVD/root finding) did not converge."""


class NoRealSolution(AffposeError):
    """The polynomial system has no admissible real root."""


class RankDeficient(AffposeError):
    """A constraint matrix does not have the expected rank."""


class InconsistentPattern(AffposeError):
    """A matrix does not decompose under the assumed structure."""


class PointAtInfinity(AffposeError):
    """A projective map sends the evaluation point to infinity."""


class EmptyInput(AffposeError):
    """An estimator was called with no correspondences."""


class AllIterationsFailed(AffposeError):
    """Every RANSAC iteration raised a solver error."""


class EmptyResult(AffposeError):
    """All pose candidates were rejected (e.g. by the cheirality test)."""


class GenerationFailed(AffposeError):
    """The synthetic generator exhausted its resampling budget."""
