"""Exception hierarchy for the simulator.

Operational errors (bad requests against a valid state) derive from
LedgerError.  InvariantViolation is different in kind: it means the state
itself is corrupt, which is always a bug, never data.
"""


class LedgerError(Exception):
    """Base class for refused operations."""


class DuplicateId(LedgerError):
    pass


class UnknownAccount(LedgerError):
    pass


class UnknownBank(LedgerError):
    pass


class UnknownLoan(LedgerError):
    pass


class UnknownSecurity(LedgerError):
    pass


class InsufficientBalance(LedgerError):
    """Account balance too small for the requested debit."""


class InsufficientCash(LedgerError):
    """A bank cannot settle the cash leg of an interbank movement."""


class InsufficientEquityCash(LedgerError):
    pass


class RegulatoryBreach(LedgerError):
    """Lending refused: the request exceeds the bank's headroom."""

    def __init__(self, message: str, headroom: int, requested: int):
        super().__init__(message)
        self.headroom = headroom
        self.requested = requested


class InvalidOperation(LedgerError):
    """Operation arguments are inconsistent with the current state."""


class InvariantViolation(AssertionError):
    """A post-mutation consistency check failed.  Always a bug."""


class ScenarioError(Exception):
    """Scenario file cannot be parsed or validated."""
