"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems exit 1, unsupported
inputs exit 3, internal invariant violations exit 4.
"""


class FreeFactorError(Exception):
    """Base class for all package errors."""


class ValidationError(FreeFactorError):
    """Input document or parameter fails validation."""


class MalformedDocument(ValidationError):
    """Spec document is syntactically broken or has wrong field shapes."""


class MassMismatch(ValidationError):
    """Total state mass of an algebra presentation is not exactly 1."""


class NonPositiveWeight(ValidationError):
    """A weight, head or diffuse mass is zero or negative."""


class RatioOutOfRange(ValidationError):
    """A geometric ratio or cyclic modular parameter is outside (0, 1)."""


class OutOfRange(ValidationError):
    """A projection mass parameter is outside the open interval (0, 1)."""


class UnsupportedInput(FreeFactorError):
    """Input is valid but outside what the implementation supports."""


class UnsupportedMagnitude(UnsupportedInput):
    """A rational has a prime factor too large to certify by the
    deterministic factorization routine."""


class UnsupportedNonTracialDim4(UnsupportedInput):
    """Reserved: a dimension-4 free product with a declared non-tracial
    state.  All two-atom presentations carry tracial states, so this is
    currently unreachable; kept for interface stability."""


class NotTracial(UnsupportedInput):
    """Matrix-model realization requested for a non-tracial presentation."""


class NotAbelian(UnsupportedInput):
    """Pairwise atom oracle applied to a non-abelian presentation."""


class SizeTooSmall(UnsupportedInput):
    """Matrix size n cannot accommodate the presentation (a component's
    rank rounds to zero, or n is not partitionable into block ranks)."""


class InternalInvariantViolation(FreeFactorError):
    """An internal cross-check failed; signals an implementation bug."""


class IdentityViolation(InternalInvariantViolation):
    """The two independent closed-form routes to an atom mass disagree."""


class IllConditioned(FreeFactorError):
    """Eigenvalues fell inside the meet cutoff's ambiguity band; the
    affected seed is reported and aborted."""
