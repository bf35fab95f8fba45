"""Exception types raised by the lindchain package."""


class LindchainError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(LindchainError, ValueError):
    """A model or operation parameter is out of its allowed range."""


class PhysicalityError(LindchainError, ValueError):
    """A correlation matrix would leave the physical window 0 <= C <= 1."""


class NoUniqueSteadyStateError(LindchainError, RuntimeError):
    """The generator has a non-decaying mode, so no unique steady state exists."""


class DefectiveEigensystemError(LindchainError, RuntimeError):
    """Biorthogonality defect too large; the eigensystem cannot be trusted."""


class GaugeUnavailableError(LindchainError, RuntimeError):
    """The diagonal gauge transform does not apply (PBC, |J| = Gamma, or a
    non-uniform on-site decay profile)."""


class CirculantError(LindchainError, ValueError):
    """Input matrix is not circulant (translation invariant) to tolerance."""


class SizeCapError(LindchainError, ValueError):
    """Requested system size exceeds the dense-algebra cap."""


class NumericsError(LindchainError, RuntimeError):
    """A solver failed to reach its required residual or tolerance."""


class ConfigError(LindchainError, ValueError):
    """Experiment configuration failed validation.

    Carries the full list of violations so a user can fix them in one pass.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" + "\n".join(
            "  - " + v for v in self.violations))
