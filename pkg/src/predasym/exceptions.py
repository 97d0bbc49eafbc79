"""Exception hierarchy.

Two branches matter to callers: :class:`ValidationError` marks rejected input
(bad files, bad parameters, impossible requests) and maps to CLI exit code 2;
:class:`NumericalError` marks conditions discovered while computing (divergent
trajectories, degenerate geometry) and maps to exit code 3.
"""


class PredasymError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PredasymError):
    """Input or parameter rejected before computation."""


class NumericalError(PredasymError):
    """Computation failed or hit a degenerate numerical condition."""


class ParseError(ValidationError):
    """Malformed data file (empty, ragged, non-numeric, missing header)."""


class LengthMismatch(ValidationError):
    """Series or arrays that must agree in length (or sampling step) do not."""


class NonFinite(ValidationError):
    """NaN or infinite value where finite data is required."""


class InvalidParams(ValidationError):
    """Parameter value outside its documented domain."""


class InvalidKind(ValidationError):
    """Model or family constructor given an excluded configuration."""


class NotStationary(ValidationError):
    """Linear-system coefficients without a stationary solution."""


class EmptyRange(ValidationError):
    """Requested range contains no elements."""


class EmptyEmbedding(ValidationError):
    """No valid base times: the series is too short for the embedding."""


class TooFewPoints(ValidationError):
    """Not enough points for the requested estimator."""


class LagOutOfRange(ValidationError):
    """Prediction lag outside the computed spectrum."""


class TooShort(ValidationError):
    """Series too short for the requested segment lengths."""


class EmptyMatrix(ValidationError):
    """Confusion matrix with zero total count."""


class DegenerateDistances(NumericalError):
    """More than half of all pairwise distances are zero."""


class SingularCovariance(NumericalError):
    """Covariance matrix numerically singular."""


class Diverged(NumericalError):
    """Generated trajectory left the finite range."""


class RejectionLimit(NumericalError):
    """Rejection sampling exceeded its retry budget."""
