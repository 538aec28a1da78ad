"""Exception hierarchy for the package.

Every structured failure mode gets its own class so callers (and the CLI's
exit-code mapping) can dispatch on type rather than on message text.
"""


class AutSplitError(Exception):
    """Base class for all package errors."""


# --- group specification validation ---

class SpecError(AutSplitError, ValueError):
    """Invalid group specification."""


class NonPrime(SpecError):
    pass


class NonIncreasingExponents(SpecError):
    pass


class ZeroRank(SpecError):
    pass


class EmptyBlocks(SpecError):
    pass


# --- shape / compatibility ---

class ShapeMismatch(AutSplitError):
    """Operands do not conform to the expected block shapes."""


class SpecMismatch(AutSplitError):
    """Operands belong to different group specifications."""


class ConstraintViolation(AutSplitError):
    """A divisibility (Hom) constraint is violated."""


class NotAUnit(AutSplitError):
    """Operation requires an automorphism but the endomorphism is not one."""


# --- derived-structure preconditions ---

class TrivialResult(AutSplitError):
    """The derived group would be trivial."""


class SingleBlock(AutSplitError):
    """Operation needs at least two blocks."""


class PreconditionGap(AutSplitError):
    """Exponent-gap precondition of the corner map fails."""


class PreconditionViolation(AutSplitError):
    """An oracle was invoked outside its stated parameter range."""


class RankTooSmall(AutSplitError):
    """No transvection exists in a rank-1 leading block."""


# --- budgets and search control flow ---

class BudgetExceeded(AutSplitError):
    """An enumeration or search exceeded its configured budget."""


class OracleBudgetExceeded(BudgetExceeded):
    """Section search ran out of budget before reaching a verdict."""


class Overflow(AutSplitError):
    """Subgroup closure exceeded its cap.

    Expected control flow during pruned searches, not a failure.
    """


# --- splitting / certificates ---

class NotSplitBlock(AutSplitError):
    """A section was requested for a block that does not split."""


class MissingBlockSection(AutSplitError):
    """Assembly needs a verified section for every block."""


class VerificationFailed(AutSplitError):
    """A certificate failed verification; carries the first counterexample."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample
