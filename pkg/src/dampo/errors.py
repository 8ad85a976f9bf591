"""Exception and warning types shared across the package."""


class DampedOscillatorError(Exception):
    """Base class for all physics and numerics errors raised by dampo."""


class NonPhysicalPoles(DampedOscillatorError):
    """Spectral-weight rates violate the reality/positivity constraints."""


class NegativeFrequency(DampedOscillatorError):
    """A frequency argument was negative where only omega >= 0 makes sense."""


class QuadratureNonConvergence(DampedOscillatorError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateRates(DampedOscillatorError):
    """Two decay rates coincide; the closed forms need a limit formula."""


class DivergentMoment(DampedOscillatorError):
    """A requested weighted average does not converge."""


class NonPhysicalState(DampedOscillatorError):
    """Gaussian moments violate the uncertainty bound."""


class UnsupportedOrder(DampedOscillatorError):
    """Symmetric-moment order beyond the implemented range."""


class InsufficientSamples(DampedOscillatorError):
    """Not enough early-time samples for the short-time frequency fit."""


class InconclusiveHorizon(DampedOscillatorError):
    """Damping classification undecided on the supplied time window."""


class DivergentIntegral(DampedOscillatorError):
    """Coupling strength integral V^2/omega diverges at zero frequency."""


class ZeroCoupling(DampedOscillatorError):
    """The resonance function is undefined where the coupling vanishes."""


class ValidationFailure(DampedOscillatorError):
    """A constructed spectral weight failed its physics checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DivergentKernel(DampedOscillatorError):
    """The spectral function is not integrable against 1/omega."""


class NonDecayedKernel(DampedOscillatorError):
    """Memory kernel has not decayed within the stored time window."""


class PositivityViolation(DampedOscillatorError):
    """Discrete bath couplings make the Hamiltonian unbounded from below."""


class ConfigError(DampedOscillatorError):
    """Run configuration is malformed or self-contradictory."""


class RecurrenceWindowExceeded(UserWarning):
    """Requested times run into the revival regime of a discrete bath."""
