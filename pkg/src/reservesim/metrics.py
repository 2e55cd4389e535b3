"""Systemic aggregates computed over state snapshots.

Money supply is the deposit aggregate only: equity cash is not money on
deposit and broader measures that mix loan instruments into the money
stock are deliberately not offered.  Debt aggregates are reported
separately so the two can be compared.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .ledger import (
    OWNER_BANK,
    OWNER_EQUITY,
    OWNER_EXTERNAL,
    SystemState,
    iter_banks,
)
from .money import Money
from .regulation import (
    RegulatoryParams,
    capital_ratio,
    classify_capitalization,
)


def money_supply(state: SystemState) -> Money:
    """Sum of all deposit balances across banks."""
    return sum(bank.deposits_total() for bank in state.banks.values())


def bank_held_loans(state: SystemState) -> Money:
    """Principal sitting on bank books (pending securitizations included)."""
    return sum(state.held_loan_principal(bank) for bank in state.banks.values())


def mbs_outstanding_by_owner(state: SystemState) -> tuple[Money, Money, Money]:
    """(external, bank-held unbooked, equity-booked) face of placed securities."""
    external = bank_held = equity = 0
    for security in state.securities.values():
        if not security.placed:
            continue
        for tranche in security.tranches:
            if tranche.owner[0] == OWNER_EXTERNAL:
                external += tranche.face
            elif tranche.owner[0] == OWNER_BANK:
                bank_held += tranche.face
            elif tranche.owner[0] == OWNER_EQUITY:
                equity += tranche.face
    return external, bank_held, equity


def total_bank_originated_debt(state: SystemState) -> Money:
    """Bank-held loan principal plus all outstanding placed security face."""
    external, bank_held, equity = mbs_outstanding_by_owner(state)
    return bank_held_loans(state) + external + bank_held + equity


class Feasibility(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


def repayment_capacity(state: SystemState, scheduled_repayments: Money) -> Feasibility:
    """Macro upper bound: repayments due in a period cannot exceed the money
    available to make them.  Deliberately crude."""
    if scheduled_repayments < 0:
        raise ValueError("scheduled repayments must be non-negative")
    if scheduled_repayments > money_supply(state):
        return Feasibility.INFEASIBLE
    return Feasibility.FEASIBLE


class PriceDirection(enum.Enum):
    INFLATION = "inflation"
    DEFLATION = "deflation"
    INDETERMINATE = "indeterminate"


def price_level_direction(money_change: int, product_supply_change: int) -> PriceDirection:
    """Directional price-level call from money and product-supply movements.

    Only single-factor movements give a determinate direction; both
    constant, or both moving, is indeterminate.
    """
    m = (money_change > 0) - (money_change < 0)
    p = (product_supply_change > 0) - (product_supply_change < 0)
    if m != 0 and p == 0:
        return PriceDirection.INFLATION if m > 0 else PriceDirection.DEFLATION
    if m == 0 and p != 0:
        return PriceDirection.DEFLATION if p > 0 else PriceDirection.INFLATION
    return PriceDirection.INDETERMINATE


@dataclass(frozen=True)
class BankMetrics:
    bank: str
    deposits: Money
    loans: Money
    cash: Money
    equity: Money  # balance-sheet view: equity cash + instrument book values
    capital_ratio: Optional[Fraction]
    capitalization: str


@dataclass(frozen=True)
class MetricsSnapshot:
    step: int
    event: str
    money_supply: Money
    bank_held_loans: Money
    mbs_external: Money
    mbs_bank_held: Money
    mbs_equity_booked: Money
    mbs_outstanding: Money
    total_bank_originated_debt: Money
    system_cash: Money
    debt_to_money: Optional[Fraction]
    banks: tuple[BankMetrics, ...]


@dataclass
class BreachRecord:
    step: int
    operation: str
    detail: str


@dataclass
class MetricsSeries:
    snapshots: list[MetricsSnapshot] = field(default_factory=list)
    breaches: list[BreachRecord] = field(default_factory=list)
    failed: bool = False
    failure_reason: str = ""

    def last(self) -> MetricsSnapshot:
        return self.snapshots[-1]


def take_snapshot(
    state: SystemState, params: RegulatoryParams, step: int, event: str
) -> MetricsSnapshot:
    external, bank_held, equity_booked = mbs_outstanding_by_owner(state)
    loans = bank_held_loans(state)
    debt = loans + external + bank_held + equity_booked
    money = money_supply(state)
    per_bank = []
    for bank in iter_banks(state):
        ratio = capital_ratio(state, bank, params)
        per_bank.append(
            BankMetrics(
                bank=bank.id,
                deposits=bank.deposits_total(),
                loans=state.held_loan_principal(bank),
                cash=bank.cash,
                equity=bank.equity_holdings(),
                capital_ratio=ratio,
                capitalization=classify_capitalization(state, bank, params).value,
            )
        )
    return MetricsSnapshot(
        step=step,
        event=event,
        money_supply=money,
        bank_held_loans=loans,
        mbs_external=external,
        mbs_bank_held=bank_held,
        mbs_equity_booked=equity_booked,
        mbs_outstanding=external + bank_held + equity_booked,
        total_bank_originated_debt=debt,
        system_cash=state.total_cash(),
        debt_to_money=Fraction(debt, money) if money > 0 else None,
        banks=tuple(per_bank),
    )
