"""Exception and warning types shared across the workbench."""


class QergoError(Exception):
    """Base class for all workbench errors."""


# --- symbols ---------------------------------------------------------------

class BandwidthTooSmall(QergoError):
    """Requested bandwidth cannot resolve the bump at the given scale."""


class InvalidScale(QergoError):
    """Localization scale outside (0, 1]."""


class InvalidGamma(QergoError):
    """Holder exponent outside (0, 1)."""


# --- quantize --------------------------------------------------------------

class AliasingError(QergoError):
    """Symbol bandwidth too large for the Hilbert space dimension."""


# --- anosov ----------------------------------------------------------------

class BandwidthOverflow(QergoError):
    """Exact pullback would exceed the configured bandwidth cap."""


class FitDegenerate(QergoError):
    """Too few data points for a meaningful fit."""


class TruncationWarning(UserWarning):
    """Grid pullback lost more spectral mass than the reporting threshold."""


# --- quantum stats ----------------------------------------------------------

class ParityError(QergoError):
    """Map matrix fails the quantizability parity condition."""


class SingularError(QergoError):
    """Propagator kernel undefined (A[0,1] = 0)."""


class AliasLimited(QergoError):
    """Egorov sweep stopped: pullback bandwidth reached N/2."""


class NotUnitary(QergoError):
    """Matrix handed to the eigensolver is not unitary."""


class ConvergenceFailure(QergoError):
    """Eigendecomposition failed to reach the residual target."""


class RadiusTooSmall(QergoError):
    """Arc radius below the lattice resolution."""


class EmptyWindow(QergoError):
    """Density extraction received an empty or undersized window family."""


# --- hyperbolic surface -----------------------------------------------------

class ReductionFailure(QergoError):
    """Dirichlet-domain reduction exceeded its iteration cap."""


class ScaleExceedsInjectivity(QergoError):
    """Observable scale above the enforced injectivity cap."""


class SignalBelowNoise(QergoError):
    """No usable fit range above the Monte Carlo noise floor."""


# --- covering ----------------------------------------------------------------

class GridTooCoarse(QergoError):
    """Candidate stream too sparse for the requested ball radius."""


class CertificateFailure(QergoError):
    """A covering certificate failed; carries the witness point."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# --- experiments -------------------------------------------------------------

class ConfigError(QergoError):
    """Experiment configuration rejected before any file is written."""
