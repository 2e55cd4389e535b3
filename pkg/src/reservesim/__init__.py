"""Deterministic multi-bank reserve-banking simulator.

Exact-integer balance sheets, regulatory capital and reserve rules, loan
securitization, and the systemic aggregates (money supply, total
bank-originated debt) they drive.
"""

from .engine import (
    Event,
    ExpansionSeries,
    run_events,
    run_loophole1,
    run_loophole2,
    textbook_expansion,
    two_bank_state,
)
from .errors import (
    InvariantViolation,
    LedgerError,
    RegulatoryBreach,
    ScenarioError,
)
from .instruments import (
    book_security_to_equity,
    default_loan,
    originate_loan,
    pay_bonus,
    pay_interest,
    repay_loan,
    securitize,
    sell_security,
)
from .ledger import (
    AccountKind,
    BankState,
    DepositAccount,
    LoanKind,
    LoanRecord,
    LoanStatus,
    Security,
    SystemState,
    Tranche,
    add_account,
    check_balance_identity,
    create_bank,
    transfer,
    verify_state,
)
from .metrics import (
    Feasibility,
    MetricsSeries,
    MetricsSnapshot,
    PriceDirection,
    money_supply,
    price_level_direction,
    repayment_capacity,
    take_snapshot,
    total_bank_originated_debt,
)
from .money import Money, format_amount, parse_amount, parse_ratio
from .regulation import (
    Capitalization,
    RegulatoryParams,
    classify_capitalization,
    equity_capital_total,
    lending_headroom,
    required_reserves,
    risk_weighted_assets,
)
from .scenario import ScenarioSpec, load_scenario, parse_scenario, run_scenario

__all__ = [name for name in dir() if not name.startswith("_")]
