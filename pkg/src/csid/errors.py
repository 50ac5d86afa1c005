"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class DivergenceError(ArithmeticError):
    """Adaptive weights became non-finite.

    ``iteration`` is the index of the update that produced the non-finite
    value; ``seed`` is filled in by the harness when known.
    """

    def __init__(self, iteration, message=None, seed=None):
        self.iteration = iteration
        self.seed = seed
        msg = message or f"non-finite adaptive weights at iteration {iteration}"
        if seed is not None:
            msg += f" (seed {seed})"
        super().__init__(msg)


class NumericalFailure(ArithmeticError):
    """A solver produced a non-finite objective or iterate."""
