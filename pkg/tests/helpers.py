"""Shared state builders for tests.

Amounts here are whole currency units; the helpers scale to minor units so
tests read like the balance-sheet walkthroughs they check.
"""

from __future__ import annotations

from reservesim import (
    AccountKind,
    LoanKind,
    RegulatoryParams,
    SystemState,
    add_account,
    create_bank,
    originate_loan,
    verify_state,
)
from reservesim.ledger import HOLDER_BANK, LoanRecord

U = 100  # minor units per currency unit


def units(amount) -> int:
    value = amount * U
    assert value == int(value)
    return int(value)


def two_banks(
    a_deposits=1000, a_equity=100, b_deposits=100, b_equity=100, employee=False
) -> SystemState:
    state = SystemState()
    create_bank(state, "A", units(a_deposits), units(a_equity))
    create_bank(state, "B", units(b_deposits), units(b_equity))
    if employee:
        add_account(state, "A", "A:employee", AccountKind.NET_TRANSACTION, 0)
    state.seal_initial_cash()
    return state


def initial_state(params: RegulatoryParams | None = None, employee=False) -> SystemState:
    """Both worked scenarios start here: A has lent 900 to B's depositor."""
    state = two_banks(employee=employee)
    originate_loan(
        state, "A", LoanKind.MORTGAGE, units(900), "B:deposits",
        params or RegulatoryParams(),
    )
    verify_state(state)
    return state


def bank_with_book(
    state: SystemState,
    bank_id: str,
    deposits,
    loans,
    equity_cash,
    kind: LoanKind = LoanKind.MORTGAGE,
    loan_id: str | None = None,
) -> None:
    """Install a bank with a given book directly; cash = deposits - loans."""
    dep, loan, eq = units(deposits), units(loans), units(equity_cash)
    assert dep >= loan
    bank = create_bank(state, bank_id, dep, eq)
    if loan:
        lid = loan_id or state.new_loan_id()
        state.loans[lid] = LoanRecord(
            id=lid,
            principal=loan,
            kind=kind,
            originator=bank_id,
            holder=(HOLDER_BANK, bank_id),
        )
        bank.held_loans.add(lid)
        bank.cash -= loan
    verify_state(state)


def bank_rows(snapshot) -> list[tuple]:
    """(bank, deposits, loans, cash, equity) per bank, in whole units."""
    return [
        (b.bank, b.deposits / U, b.loans / U, b.cash / U, b.equity / U)
        for b in snapshot.banks
    ]
