"""Exception hierarchy shared by all catnh modules."""


class CatnhError(Exception):
    """Base class for all errors raised by catnh."""


class DimensionMismatch(CatnhError):
    """Operands live on Fock spaces of different dimension."""


class TruncationError(CatnhError):
    """The requested state/operator does not fit the truncated Fock space."""


class DegenerateAmplitude(CatnhError):
    """Amplitude too small to resolve an odd-parity superposition."""


class ConvergenceFailure(CatnhError):
    """An eigensolver or propagator failed to converge."""


class ClassificationFailure(CatnhError):
    """Spectrum classification (parity/cat/excited labels) failed."""


class StepSizeUnderflow(CatnhError):
    """Adaptive integrator drove the step size below machine resolution."""


class PositivityLoss(CatnhError):
    """Evolved density matrix developed a significant negative eigenvalue."""


class NoSignChange(CatnhError):
    """Root bracketing failed: the target function does not change sign."""


class UndefinedDiagnosis(CatnhError):
    """PT-phase diagnosis requested for the zero matrix."""


class UndefinedConcurrence(CatnhError):
    """Concurrence requested for an identically zero state."""


class ConfigError(CatnhError):
    """Invalid experiment configuration (unknown key, bad type, bad value)."""
