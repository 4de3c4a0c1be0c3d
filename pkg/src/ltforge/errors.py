"""Exception types shared across the library.

Every error raised on a violated mathematical precondition derives from
LTForgeError, so callers can distinguish "the input is outside the
contract" from genuine bugs (plain AssertionError / ValueError).
"""


class LTForgeError(Exception):
    """Base class for all contract violations raised by this library."""


# --- base arithmetic ---------------------------------------------------

class MixedSpec(LTForgeError):
    """Operands belong to different local fields."""


class NotAUnit(LTForgeError):
    """Inversion requested for an element of positive valuation."""


# --- power series ------------------------------------------------------

class MixedRing(LTForgeError):
    """Series operands live over different coefficient rings."""


class NonzeroConstantTerm(LTForgeError):
    """Substitution/inversion requires vanishing constant term."""


class NotInvertible(LTForgeError):
    """Compositional inverse requested but the linear coefficient is not a unit."""


class PrecisionExhausted(LTForgeError):
    """The pi-adic digit budget cannot support the requested series order."""


# --- Lubin-Tate constructions -------------------------------------------

class IntegralityFailure(LTForgeError):
    """A coefficient that must be integral came out with negative valuation.

    This signals an internal bug or an exhausted working precision, never
    a user error.
    """


class WrongCoordinate(LTForgeError):
    """Operation requires the special-log coordinate."""


# --- characteristic-p dynamics ------------------------------------------

class CommutationFails(LTForgeError):
    """The hypothesis w_twist . f = f . w does not hold at truncation."""


class NotSeparable(LTForgeError):
    """Series has identically vanishing derivative."""


class TorsionW(LTForgeError):
    """The auxiliary series w is torsion under composition."""


class TorsionGamma(LTForgeError):
    """The acting unit is a root of unity."""


class BaseFieldIsQp(LTForgeError):
    """Witness requires residue field larger than F_p."""


class BadGamma(LTForgeError):
    """The acting unit is not congruent to 1 mod pi."""


# --- Frobenius lift / recovery -------------------------------------------

class ValuationZero(LTForgeError):
    """Lift input must have positive valuation."""


class BudgetExceeded(LTForgeError):
    """Requested precision/order/depth combination reserves more depth than allowed."""


class WrongValuation(LTForgeError):
    """Recovery input must be a uniformizer at its depth (valuation one)."""


class NotEquivariant(LTForgeError):
    """Input fails commutation with a sampled unit action.

    Attributes:
        generator: JSON-ready description of the unit that witnessed failure.
    """

    def __init__(self, message, generator=None):
        super().__init__(message)
        self.generator = generator


class VerificationFailed(LTForgeError):
    """Lift succeeded but the final identity check did not close."""


class NoSeparablePower(LTForgeError):
    """No p-power twist of the input becomes separable within the budget."""
