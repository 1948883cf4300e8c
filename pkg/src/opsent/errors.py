"""Exception types raised across the package."""


class OpsentError(Exception):
    """Base class for all package errors."""


class InvalidKinematics(OpsentError, ValueError):
    """Input violates a kinematic invariant (range, conservation)."""


class DegenerateKinematics(OpsentError, ValueError):
    """Photon directions or the decay plane are undefined."""


class ZeroNormState(OpsentError, ValueError):
    """State norm below the degeneracy threshold."""


class BasisError(OpsentError, ValueError):
    """Wrong basis tag, or a local basis that is not orthonormal."""


class NoConvergence(OpsentError, RuntimeError):
    """Every optimizer run exhausted its iteration budget."""


class EnvelopeExceeded(OpsentError, RuntimeError):
    """A sampled weight exceeded the rejection-sampling envelope."""

    def __init__(self, message, weight=None, envelope=None, point=None):
        super().__init__(message)
        self.weight = weight
        self.envelope = envelope
        self.point = point
