"""Exception hierarchy shared by every solver."""


class RepackingError(Exception):
    """Base class for all errors raised by this package."""


class RejectedInstance(RepackingError):
    """The input is not a well-formed instance (never a no-answer)."""


class IllegalBunch(RepackingError):
    pass


class IllegalMove(RepackingError):
    """Base for moves that cannot be applied to a configuration."""


class ItemNotInBunch(IllegalMove):
    pass


class CapacityExceeded(IllegalMove):
    pass


class IndexOutOfRange(IllegalMove):
    pass


class PreconditionViolated(RepackingError):
    pass


class NotPow2Instance(PreconditionViolated):
    pass


class DoesNotFit(RepackingError):
    pass


class BudgetExceeded(RepackingError):
    """A search ran past its configured budget; the answer is unknown."""


class ExplosionGuard(RepackingError):
    """An enumeration exceeded its configured size cap."""


class InternalInvariantViolation(RepackingError):
    """A property that the algorithm guarantees did not hold. Indicates a bug."""


class MalformedFlow(RepackingError):
    pass


class NotConforming(RepackingError):
    pass


class NotSorted(RepackingError):
    pass


class InvalidCertificate(RepackingError):
    pass


class InvariantViolated(RepackingError):
    pass
