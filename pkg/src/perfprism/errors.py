"""Exception hierarchy shared by all perfprism modules.

The CLI maps these onto exit codes: PrecisionFailure subclasses exit with
code 2, InputError with 3, ConvergenceFailure with 4.
"""


class PerfprismError(Exception):
    """Base class for all library errors."""


class InputError(PerfprismError):
    """Malformed input document or incompatible operands."""


class WindowMismatch(InputError):
    """Operands live over different rings or incompatible windows."""


class CoeffMismatch(InputError):
    """Matrix operands have different coefficient rings."""


class PrecisionFailure(PerfprismError):
    """The declared truncation cannot certify the requested result."""


class NotAUnit(PrecisionFailure):
    """Inversion of an element whose leading term vanishes."""


class DenominatorOverflow(PrecisionFailure):
    """An inverse Frobenius would exceed the configured denominator bound."""


class NonConstantCoefficients(InputError):
    """Ghost components require constant (support {0}) coefficients."""


class InsufficientPrecision(PrecisionFailure):
    """A digit needed by the operation is not representable."""


class PrecisionExhausted(PrecisionFailure):
    """An iteration or certificate ran out of representable precision."""


class GuardInsufficient(PrecisionFailure):
    """Consecutive guard levels of the untilt map disagree at target precision."""


class OutOfInterval(InputError):
    """A radius parameter lies outside the declared interval."""


class ZeroElement(InputError):
    """Operation undefined on the zero representation."""


class NotPrimitive(InputError):
    """Division requires a Fontaine-primitive divisor."""


class NotAUnitDeterminant(PrecisionFailure):
    """Determinant valuation cannot be certified at the given precision."""


class ResidueCollision(InputError):
    """Zero-separation centers have equal residues."""


class ConvergenceFailure(PerfprismError):
    """An iterative scheme failed its certified contraction contract."""


class NoConvergence(ConvergenceFailure):
    """Newton projector defect failed to decrease."""


class HenselFailure(ConvergenceFailure):
    """A quantified Hensel step did not contract as predicted."""


class SearchExhausted(ConvergenceFailure):
    """A bounded search (e.g. for a trivializing extension) hit its bound."""


class NotContracting(ConvergenceFailure):
    """Decompletion defect failed to decrease by the predicted factor."""


class MaxIterExceeded(ConvergenceFailure):
    """Iteration limit reached before the target was certified."""


class SlopeOrderViolation(InputError):
    """Filtration blocks are not in strictly decreasing slope order."""


class NotPhiStable(InputError):
    """A presentation's Frobenius-equivariance certificate failed."""
