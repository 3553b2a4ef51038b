"""Exception types shared across the package."""


class HardlearnError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class InvalidParamsError(HardlearnError, ValueError):
    """A parameter set violates a named invariant."""

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        msg = f"invariant violated: {invariant}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ParamMismatchError(HardlearnError, ValueError):
    """Operands live in different rings or have mismatched dimensions."""


class BudgetExceededError(HardlearnError):
    """An oracle was called more often than the learner's budget allows."""


class NotAJuntaError(HardlearnError):
    """The junta learner found more relevant variables than its bound."""


class TrialError(HardlearnError):
    """A Monte-Carlo trial raised; carries the failing trial index."""

    def __init__(self, index, cause):
        self.index = index
        super().__init__(f"trial {index} failed: {cause!r}")
