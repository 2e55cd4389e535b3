"""Balance-sheet primitives: banks, deposit accounts, cash, transfers.

The model follows one accounting identity at every bank, at all times:

    sum(deposit balances) == sum(held loan principal) + cash

Equity capital is held completely separately from the deposit-side books:
equity cash never counts as a deposit and deposit cash never counts as
equity.  Interbank deposit movements settle immediately in cash (gross
settlement), so total system cash (deposit-backing cash + equity cash) is
conserved by every operation in the simulator.

``loss_gap`` records write-downs that could not be covered by equity cash
after a default; it keeps the identity checkable for impaired banks while
leaving depositor balances untouched (see instruments.default_loan).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import (
    DuplicateId,
    InsufficientBalance,
    InsufficientCash,
    InvariantViolation,
    UnknownAccount,
    UnknownBank,
)
from .money import Money


class AccountKind(enum.Enum):
    NET_TRANSACTION = "net-transaction"
    OTHER = "other"


class LoanKind(enum.Enum):
    MORTGAGE = "mortgage"
    OTHER = "other"


class LoanStatus(enum.Enum):
    PERFORMING = "performing"
    DEFAULTED = "defaulted"
    REPAID = "repaid"


# Holder / owner tags.  A loan is held by a bank or wrapped by a security;
# a tranche belongs to the issuing bank's book, an external account, or a
# bank's equity capital.
HOLDER_BANK = "bank"
HOLDER_SECURITY = "security"

OWNER_BANK = "bank"
OWNER_EXTERNAL = "external"
OWNER_EQUITY = "bank-equity"


@dataclass
class DepositAccount:
    id: str
    bank: str
    balance: Money
    kind: AccountKind = AccountKind.NET_TRANSACTION


@dataclass
class LoanRecord:
    id: str
    principal: Money
    kind: LoanKind
    originator: str
    holder: tuple[str, str]  # (HOLDER_BANK, bank id) or (HOLDER_SECURITY, security id)
    status: LoanStatus = LoanStatus.PERFORMING


@dataclass
class Tranche:
    label: str
    face: Money                    # outstanding face value
    owner: tuple[str, str]         # (OWNER_* tag, bank/account id)
    book_value: Money = 0          # set when booked into equity capital


@dataclass
class Security:
    id: str
    issuer: str
    backing_loans: tuple[str, ...]
    face_value: Money              # at creation
    tranches: list[Tranche] = field(default_factory=list)
    placed: bool = False           # backing left the issuer's loan book

    def outstanding(self) -> Money:
        return sum(t.face for t in self.tranches)

    def tranche(self, label: str) -> Tranche:
        for t in self.tranches:
            if t.label == label:
                return t
        raise UnknownAccount(f"security {self.id} has no tranche {label!r}")


@dataclass
class BankState:
    id: str
    accounts: dict[str, DepositAccount] = field(default_factory=dict)
    held_loans: set[str] = field(default_factory=set)
    cash: Money = 0
    equity_cash: Money = 0
    # tranche key "security:label" -> current book value
    equity_instruments: dict[str, Money] = field(default_factory=dict)
    loss_gap: Money = 0
    failed: bool = False

    def deposits_total(self) -> Money:
        return sum(a.balance for a in self.accounts.values())

    def net_transaction_total(self) -> Money:
        return sum(
            a.balance
            for a in self.accounts.values()
            if a.kind is AccountKind.NET_TRANSACTION
        )

    def equity_holdings(self) -> Money:
        """Balance-sheet equity: cash plus instrument book values.

        This is what the per-bank "Equity Capital" column reports; the
        regulatory measure (with the Tier-2 cap) lives in regulation.py.
        """
        return self.equity_cash + sum(self.equity_instruments.values())


@dataclass
class AuditRecord:
    step: int
    operation: str
    detail: str


@dataclass
class SystemState:
    banks: dict[str, BankState] = field(default_factory=dict)
    account_index: dict[str, str] = field(default_factory=dict)  # account -> bank
    loans: dict[str, LoanRecord] = field(default_factory=dict)
    securities: dict[str, Security] = field(default_factory=dict)
    clock: int = 0
    audit: list[AuditRecord] = field(default_factory=list)
    initial_total_cash: Optional[Money] = None
    _next_loan: int = 1
    _next_security: int = 1

    # -- lookups ---------------------------------------------------------

    def bank(self, bank_id: str) -> BankState:
        try:
            return self.banks[bank_id]
        except KeyError:
            raise UnknownBank(f"no bank {bank_id!r}") from None

    def account(self, account_id: str) -> DepositAccount:
        bank_id = self.account_index.get(account_id)
        if bank_id is None:
            raise UnknownAccount(f"no account {account_id!r}")
        return self.banks[bank_id].accounts[account_id]

    def held_loan_principal(self, bank: BankState) -> Money:
        return sum(self.loans[lid].principal for lid in bank.held_loans)

    def new_loan_id(self) -> str:
        lid = f"loan{self._next_loan}"
        self._next_loan += 1
        return lid

    def new_security_id(self) -> str:
        sid = f"mbs{self._next_security}"
        self._next_security += 1
        return sid

    def total_cash(self) -> Money:
        """Deposit-backing cash plus equity cash, across all banks."""
        return sum(b.cash + b.equity_cash for b in self.banks.values())

    def record(self, operation: str, detail: str) -> None:
        self.audit.append(AuditRecord(self.clock, operation, detail))

    def seal_initial_cash(self) -> None:
        """Fix the conserved cash total; verify_state checks it thereafter."""
        self.initial_total_cash = self.total_cash()


# -- operations ------------------------------------------------------------


def create_bank(
    state: SystemState,
    bank_id: str,
    initial_deposit_total: Money,
    initial_equity_cash: Money,
    account_id: str | None = None,
) -> BankState:
    """Create a bank with one aggregate net-transaction account.

    The aggregate account holds the whole initial deposit base and the bank
    holds matching cash, so the balance identity starts exact.
    """
    if initial_deposit_total < 0 or initial_equity_cash < 0:
        raise ValueError("initial amounts must be non-negative")
    if not bank_id or any(ch in bank_id for ch in ":,\n"):
        # Bank ids appear in CSV column names and tranche keys.
        raise ValueError(f"bank id {bank_id!r} must avoid ':' and ','")
    if bank_id in state.banks:
        raise DuplicateId(f"bank {bank_id!r} already exists")
    bank = BankState(id=bank_id, cash=initial_deposit_total, equity_cash=initial_equity_cash)
    state.banks[bank_id] = bank
    acct_id = account_id or f"{bank_id}:deposits"
    add_account(state, bank_id, acct_id, AccountKind.NET_TRANSACTION, initial_deposit_total)
    return bank


def add_account(
    state: SystemState,
    bank_id: str,
    account_id: str,
    kind: AccountKind = AccountKind.NET_TRANSACTION,
    balance: Money = 0,
) -> DepositAccount:
    bank = state.bank(bank_id)
    if account_id in state.account_index:
        raise DuplicateId(f"account {account_id!r} already exists")
    account = DepositAccount(id=account_id, bank=bank_id, balance=balance, kind=kind)
    bank.accounts[account_id] = account
    state.account_index[account_id] = bank_id
    return account


def move_deposit(
    state: SystemState, from_account: str, to_account: str, amount: Money
) -> None:
    """Debit one account, credit another, settling cash across banks.

    Shared posting used by transfer and by the payment legs of security
    sales and loan repayments.
    """
    if amount < 0:
        raise ValueError("amount must be non-negative")
    src = state.account(from_account)
    dst = state.account(to_account)
    if src.balance < amount:
        raise InsufficientBalance(
            f"account {from_account!r} holds {src.balance}, needs {amount}"
        )
    if src.bank != dst.bank:
        payer_bank = state.bank(src.bank)
        payee_bank = state.bank(dst.bank)
        if payer_bank.cash < amount:
            raise InsufficientCash(
                f"bank {src.bank!r} cannot settle {amount} (cash {payer_bank.cash})"
            )
        payer_bank.cash -= amount
        payee_bank.cash += amount
    src.balance -= amount
    dst.balance += amount


def transfer(
    state: SystemState, from_account: str, to_account: str, amount: Money
) -> SystemState:
    """Depositor-to-depositor payment.  Total system cash is unchanged."""
    move_deposit(state, from_account, to_account, amount)
    check_balance_identity(state, state.account(from_account).bank, raise_on_fail=True)
    check_balance_identity(state, state.account(to_account).bank, raise_on_fail=True)
    return state


def check_balance_identity(
    state: SystemState, bank_id: str, raise_on_fail: bool = False
) -> bool:
    """True iff deposits == held loans + cash (+ recorded loss gap)."""
    bank = state.bank(bank_id)
    deposits = bank.deposits_total()
    assets = state.held_loan_principal(bank) + bank.cash + bank.loss_gap
    ok = deposits == assets
    if not ok and raise_on_fail:
        raise InvariantViolation(
            f"balance identity broken at bank {bank_id!r}: "
            f"deposits {deposits} != loans+cash+gap {assets}"
        )
    return ok


def verify_state(state: SystemState) -> None:
    """Check every structural invariant; raise InvariantViolation on failure.

    Run by the engine after each event.  A failure is a bug in an
    operation, never legitimate data.
    """
    for bank_id, bank in state.banks.items():
        check_balance_identity(state, bank_id, raise_on_fail=True)
        if bank.cash < 0:
            raise InvariantViolation(f"bank {bank_id!r} cash negative: {bank.cash}")
        if bank.equity_cash < 0:
            raise InvariantViolation(
                f"bank {bank_id!r} equity cash negative: {bank.equity_cash}"
            )
        for account in bank.accounts.values():
            if account.balance < 0:
                raise InvariantViolation(
                    f"account {account.id!r} balance negative: {account.balance}"
                )
        for key in bank.equity_instruments:
            sec_id, _, label = key.partition(":")
            security = state.securities.get(sec_id)
            if security is None:
                raise InvariantViolation(f"equity instrument {key!r} has no security")
            tranche = security.tranche(label)
            if tranche.owner != (OWNER_EQUITY, bank_id):
                raise InvariantViolation(
                    f"equity instrument {key!r} not owned by bank {bank_id!r}"
                )

    _verify_loan_placement(state)
    _verify_tranche_owners(state)

    if state.initial_total_cash is not None:
        total = state.total_cash()
        if total != state.initial_total_cash:
            raise InvariantViolation(
                f"system cash changed: {total} != {state.initial_total_cash}"
            )


def _verify_loan_placement(state: SystemState) -> None:
    held_by: dict[str, list[str]] = {}
    for bank_id, bank in state.banks.items():
        for lid in bank.held_loans:
            held_by.setdefault(lid, []).append(bank_id)

    for lid, loan in state.loans.items():
        holders = held_by.get(lid, [])
        if len(holders) > 1:
            raise InvariantViolation(f"loan {lid!r} held by multiple banks: {holders}")
        tag, ref = loan.holder
        if loan.status is LoanStatus.REPAID or (
            loan.status is LoanStatus.DEFAULTED and tag == HOLDER_BANK
        ):
            # Fully repaid, or written off while bank-held: off the books.
            if holders:
                raise InvariantViolation(
                    f"{loan.status.value} loan {lid!r} still on a book"
                )
            continue
        if tag == HOLDER_BANK:
            if holders != [ref]:
                raise InvariantViolation(
                    f"loan {lid!r} holder {ref!r} disagrees with books {holders}"
                )
        elif tag == HOLDER_SECURITY:
            security = state.securities.get(ref)
            if security is None or lid not in security.backing_loans:
                raise InvariantViolation(f"loan {lid!r} points at missing security {ref!r}")
            if security.placed and holders:
                raise InvariantViolation(
                    f"loan {lid!r} inside placed security {ref!r} but still on a book"
                )
            if not security.placed and holders != [security.issuer]:
                raise InvariantViolation(
                    f"loan {lid!r} in pending security {ref!r} must stay on issuer's book"
                )
        else:
            raise InvariantViolation(f"loan {lid!r} has unknown holder tag {tag!r}")

    for lid in held_by:
        if lid not in state.loans:
            raise InvariantViolation(f"book references unregistered loan {lid!r}")


def _verify_tranche_owners(state: SystemState) -> None:
    for security in state.securities.values():
        for tranche in security.tranches:
            if tranche.face < 0:
                raise InvariantViolation(
                    f"tranche {security.id}:{tranche.label} face negative"
                )
            tag, ref = tranche.owner
            if tag == OWNER_EXTERNAL:
                if ref not in state.account_index:
                    raise InvariantViolation(
                        f"tranche {security.id}:{tranche.label} owned by"
                        f" unknown account {ref!r}"
                    )
            elif tag in (OWNER_BANK, OWNER_EQUITY):
                if ref not in state.banks:
                    raise InvariantViolation(
                        f"tranche {security.id}:{tranche.label} owned by"
                        f" unknown bank {ref!r}"
                    )
                key = f"{security.id}:{tranche.label}"
                booked = key in state.banks[ref].equity_instruments
                if (tag == OWNER_EQUITY) != booked:
                    raise InvariantViolation(
                        f"tranche {key!r} equity booking out of sync"
                    )
            else:
                raise InvariantViolation(f"unknown tranche owner tag {tag!r}")


def iter_banks(state: SystemState) -> Iterable[BankState]:
    """Banks in sorted id order (deterministic iteration everywhere)."""
    for bank_id in sorted(state.banks):
        yield state.banks[bank_id]
