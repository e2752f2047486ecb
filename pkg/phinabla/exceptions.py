class PhiNablaError(Exception):
    """ Base class of every error raised by `phinabla`. """

    pass


class FieldError(PhiNablaError):
    """ Raised when the coefficient field cannot be built or an operation in it is undefined. """

    pass


class NonPrime(FieldError):
    """ Raised when the residue characteristic given to `make_field` is not a prime number. """

    pass


class NoIrreduciblePolynomialFound(FieldError):
    """ Raised when no monic irreducible polynomial of the requested degree was found modulo p. """

    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    """ Raised when inverting a scalar that is zero (exactly or at precision). """

    pass


class ContextMismatch(PhiNablaError):
    """ Raised when values living in different fields or rings are combined. """

    pass


class PrecisionError(PhiNablaError):
    """
    Extends `PhiNablaError`. Raised when the finite surrogate (precision N and support window) is not enough
    to decide a question.
    """

    pass


class NotInvertibleAtPrecision(PrecisionError):
    """ Raised when an element or a matrix has no inverse computable at the working precision and window. """

    pass


class WindowInconclusive(PrecisionError):
    """ Raised when the support window admits spurious boundary solutions or hides the relevant terms. """

    pass


class UnboundedDeterminant(PrecisionError):
    """ Raised when a determinant vanishes at precision, so its 1-Gauss valuation is unbounded. """

    pass


class WildRamification(PhiNablaError):
    """ Raised when a Kummer extension of degree divisible by p is requested. """

    pass


class UnsupportedFrobeniusLift(PhiNablaError):
    """ Raised when an operation only implemented for the default lift t -> t^q meets another lift. """

    pass


class RankError(PhiNablaError):
    """ Raised when matrix shapes or module ranks do not fit the requested functor. """

    pass


class SlopeError(PhiNablaError):
    """ Raised when a slope s/r is given with gcd(s, r) != 1 or r <= 0. """

    pass


class MalformedCertificate(PhiNablaError):
    """ Raised when a slope certificate is structurally invalid for the module it is checked against. """

    pass


class PatternViolation(PhiNablaError):
    """ Raised when a transported pair leaves the parabolic block pattern prescribed by a certificate. """

    pass


class MembershipError(PhiNablaError):
    """ Raised when a matrix that must lie in G (or its Lie algebra) does not, at precision. """

    pass


class GaugeIncompatible(PhiNablaError):
    """ Raised when a (phi, nabla)-module is built from matrices failing the gauge compatibility. """

    pass


class FiltrationError(PhiNablaError):
    """ Raised when filtration data is inconsistent (unsorted jumps, non-positive ranks, negative scale). """

    pass


class ZeroScale(FiltrationError):
    """ Raised when relabelling a filtration by the scale 0. """

    pass


class DocumentError(PhiNablaError):
    """ Raised when a JSON document does not follow the expected schema. """

    pass


class UsageError(PhiNablaError):
    """ Raised for command-line usage errors (unknown flags, missing inputs). """

    pass
