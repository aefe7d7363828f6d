"""Exception hierarchy shared by all soliton-forge modules."""


class SolitonForgeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SolitonForgeError):
    """Argument outside the mathematical domain of an operation."""


class NotExact(SolitonForgeError):
    """Formal integration attempted on something that is not a total x-derivative."""


class JetTooShort(SolitonForgeError):
    """A jet does not supply enough derivative orders for an evaluation."""


class CheckFailed(SolitonForgeError):
    """A symbolic verification found a coefficient that violates the claimed identity."""


class DegenerateCurve(SolitonForgeError):
    """Spectral-curve roots are not the expected number of distinct reals."""


class ComplexAuxSpectrum(SolitonForgeError):
    """Auxiliary-spectrum roots left the real axis beyond tolerance."""


class CollisionError(SolitonForgeError):
    """Two auxiliary-spectrum points approached within collision tolerance."""


class StepFailure(SolitonForgeError):
    """The adaptive integrator could not complete a step at the requested tolerance."""


class CFLViolation(SolitonForgeError):
    """Time step request incompatible with the advective CFL condition."""


class ZeroField(SolitonForgeError):
    """A complex field value vanished where a division by it is required."""
