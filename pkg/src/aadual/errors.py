"""Exception hierarchy for the library.

Every failure mode of the numerical contracts gets its own class so that
callers (and the CLI) can distinguish bad input from genuine breakdown.
"""


class AADualError(Exception):
    """Base class for all library errors."""


class ParamsError(AADualError):
    """Model parameters violate a hard requirement (mu > 0, |u| != |v|)."""


class NonInvertible(AADualError):
    """A pivot vanished during triangular orthogonalization."""


class NotHermitian(AADualError):
    """Input matrix fails the Hermitian symmetry tolerance."""


class Singular(AADualError):
    """Matrix is numerically singular (smallest singular value too small)."""


class AngleUndefined(AADualError):
    """Angle recovery requested at a chart boundary (some coordinate is zero)."""


class DomainError(AADualError):
    """Argument lies outside the admissible domain of the operation."""


class SectionUnavailable(AADualError):
    """The implemented gauge section requires |u| > |v| with u < 0."""


class PhaseUndefined(AADualError):
    """A gauge-fixing modulus vanished where positivity is guaranteed."""


class BoundaryPoint(AADualError):
    """Operation needs an interior point but received a boundary one."""


class ReconstructionFailure(AADualError):
    """Eigenvalue splitting of the reflection matrix is ambiguous."""


class DegenerateSingularValues(AADualError):
    """Singular values collide; the regular gauge transport is undefined."""


class NotQuasiDiagonal(AADualError):
    """Group element is not in the quasi-diagonal normal slice."""


class SpectrumOffCircle(AADualError):
    """An eigenvalue that must be unimodular drifted off the unit circle."""


class PoleCollision(AADualError):
    """Two poles of the rational one-form coincide; residues are not simple."""


class NoConvergence(AADualError):
    """Fixed-point iteration of the implicit integrator failed to converge."""


class StepRejected(AADualError):
    """Re-projection correction after an integration step was too large."""


class ConfigError(AADualError):
    """Run configuration is malformed."""
