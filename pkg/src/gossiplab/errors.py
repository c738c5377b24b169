"""Exception types shared across the package."""


class GossipLabError(Exception):
    """Base class for all gossiplab errors."""


class RetryExhausted(GossipLabError):
    """Random generation failed to produce a valid draw within the retry budget."""

    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts


class NotStronglyConnected(GossipLabError):
    """A strongly connected digraph was required."""


class InvalidEpsilon(GossipLabError):
    """Perturbation parameter outside the allowed range for the scheme kind."""


class NoConvergence(GossipLabError):
    """The dense eigenvalue iteration failed to converge."""


class NotSimple(GossipLabError):
    """Requested eigenvalue is not simple enough for a well-posed eigenvector."""


class SizeOverflow(GossipLabError):
    """Requested dense product would exceed the configured entry cap."""


class BadStationaryVector(GossipLabError):
    """Supplied vector is not a stationary left eigenvector of B."""


class XiOutOfRange(GossipLabError):
    """Laplacian eigenvalue outside [0, 2]."""


class BadXi(GossipLabError):
    """Nonpositive Laplacian eigenvalue where a positive one is required."""


class MissingCoords(GossipLabError):
    """The requested initialization needs node coordinates."""


class MassConservationError(GossipLabError):
    """Sum-preservation invariant violated during a trial."""
