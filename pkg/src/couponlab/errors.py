"""Exception hierarchy shared by the library and the CLI."""


class CouponLabError(Exception):
    """Base class for all errors raised by couponlab."""

    exit_code = 1


class InputError(CouponLabError, ValueError):
    """Arguments outside the documented domain."""

    exit_code = 2


class InvalidTransitionError(InputError):
    """Advance requested from a level that holds no coupon types."""


class CapacityError(CouponLabError):
    """A table or state space would exceed its configured limit."""

    exit_code = 3

    def __init__(self, message: str, required: int | None = None, limit: int | None = None):
        super().__init__(message)
        self.required = required
        self.limit = limit


class ConvergenceError(CouponLabError, ArithmeticError):
    """A numerical method failed to reach the requested tolerance."""

    exit_code = 4

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class SimulationError(CouponLabError, RuntimeError):
    """A replication hit the run safety cap."""

    exit_code = 4
