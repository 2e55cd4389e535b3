"""Regulatory parameters and the pure functions computed from them.

Rounding always tightens the constraint: required reserves round up,
risk-weighted assets round up, countable capital and lending headroom
round down.  All functions are pure over immutable snapshots and safe to
evaluate in parallel.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction

from .ledger import BankState, LoanKind, SystemState
from .money import Money, ceil_frac, floor_frac, parse_ratio


@dataclass(frozen=True)
class RegulatoryParams:
    reserve_ratio: Fraction = Fraction(1, 10)
    well_capitalized_ratio: Fraction = Fraction(1, 10)
    adequate_ratio: Fraction = Fraction(8, 100)
    risk_weight_mortgage: Fraction = Fraction(1, 2)
    risk_weight_other: Fraction = Fraction(1)
    # Largest share of the (adequate_ratio-sized) capital requirement that
    # Tier-2 instruments may satisfy, measured against risk-weighted assets.
    tier2_cap_share: Fraction = Fraction(4, 100)
    # Valuation haircut applied when a security tranche is booked as equity.
    mbs_equity_valuation_weight: Fraction = Fraction(1, 2)

    def __post_init__(self):
        for name in (
            "reserve_ratio",
            "well_capitalized_ratio",
            "adequate_ratio",
            "risk_weight_mortgage",
            "risk_weight_other",
            "tier2_cap_share",
            "mbs_equity_valuation_weight",
        ):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    def weight(self, kind: LoanKind) -> Fraction:
        if kind is LoanKind.MORTGAGE:
            return self.risk_weight_mortgage
        return self.risk_weight_other

    def with_overrides(self, overrides: dict[str, str]) -> "RegulatoryParams":
        fields = {}
        for key, raw in overrides.items():
            if key not in self.__dataclass_fields__:
                raise ValueError(f"unknown regulatory parameter {key!r}")
            fields[key] = parse_ratio(raw)
        return replace(self, **fields)


class Capitalization(enum.Enum):
    WELL = "well"
    ADEQUATE = "adequate"
    UNDER = "under"


def required_reserves(bank: BankState, params: RegulatoryParams) -> Money:
    """Reserve requirement on net-transaction deposits, rounded up."""
    return ceil_frac(params.reserve_ratio * bank.net_transaction_total())


def risk_weighted_assets(
    state: SystemState, bank: BankState, params: RegulatoryParams
) -> Money:
    """Weighted held-loan principal, rounded up once on the total.

    Only loans on the bank's book count; instruments booked into equity
    capital carry no risk exposure here.
    """
    total = Fraction(0)
    for lid in bank.held_loans:
        loan = state.loans[lid]
        total += params.weight(loan.kind) * loan.principal
    return ceil_frac(total)


def _tier2_cap(rwa: Money, params: RegulatoryParams) -> Money:
    """Largest countable Tier-2 book value for a given risk-asset base."""
    if params.tier2_cap_share == 0:
        return 0
    if params.adequate_ratio == 0:
        # No adequacy floor to apportion: leave Tier 2 unconstrained.
        return None  # type: ignore[return-value]
    return floor_frac(params.tier2_cap_share / params.adequate_ratio * rwa)


def _countable_instruments(books: Money, rwa: Money, params: RegulatoryParams) -> Money:
    cap = _tier2_cap(rwa, params)
    if cap is None:
        return books
    return min(books, cap)


def equity_capital_total(
    state: SystemState, bank: BankState, params: RegulatoryParams
) -> Money:
    """Regulatory equity: cash plus countable instrument book values.

    Instrument book values count only up to the Tier-2 cap for the bank's
    current risk-weighted assets; excess book value counts zero.  The
    uncapped balance-sheet view is BankState.equity_holdings().
    """
    rwa = risk_weighted_assets(state, bank, params)
    books = sum(bank.equity_instruments.values())
    return bank.equity_cash + _countable_instruments(books, rwa, params)


def capital_ratio(
    state: SystemState, bank: BankState, params: RegulatoryParams
) -> Fraction | None:
    """equity / RWA; None when the bank carries no risk assets."""
    rwa = risk_weighted_assets(state, bank, params)
    if rwa == 0:
        return None
    return Fraction(equity_capital_total(state, bank, params), rwa)


def classify_capitalization(
    state: SystemState, bank: BankState, params: RegulatoryParams
) -> Capitalization:
    ratio = capital_ratio(state, bank, params)
    if ratio is None:
        return Capitalization.WELL
    if ratio >= params.well_capitalized_ratio:
        return Capitalization.WELL
    if ratio >= params.adequate_ratio:
        return Capitalization.ADEQUATE
    return Capitalization.UNDER


def _capital_constraint_ok(
    weighted_base: Fraction,
    weight: Fraction,
    principal: Money,
    equity_cash: Money,
    books: Money,
    params: RegulatoryParams,
) -> bool:
    """Would the well-capitalized ratio hold after lending `principal`?

    Evaluated on the post-lend position: the new loan enlarges the
    risk-asset base, which in turn enlarges the Tier-2 allowance, so booked
    instruments count toward the capital that supports the loan they
    accompany.
    """
    rwa = ceil_frac(weighted_base + weight * principal)
    equity = equity_cash + _countable_instruments(books, rwa, params)
    return Fraction(rwa) <= Fraction(equity) / params.well_capitalized_ratio


def _capital_bound(
    state: SystemState, bank: BankState, params: RegulatoryParams, kind: LoanKind
) -> Money:
    """Largest principal passing the post-lend capital check."""
    weight = params.weight(kind)
    if params.well_capitalized_ratio == 0:
        return None  # type: ignore[return-value]  # no capital constraint
    weighted_base = Fraction(0)
    for lid in bank.held_loans:
        loan = state.loans[lid]
        weighted_base += params.weight(loan.kind) * loan.principal
    equity_cash = bank.equity_cash
    books = sum(bank.equity_instruments.values())

    if weight == 0:
        # Zero-weight loans never move the ratio; feasibility is just the
        # current ratio check with no new principal.
        ok0 = _capital_constraint_ok(weighted_base, weight, 0, equity_cash, books, params)
        return None if ok0 else 0  # type: ignore[return-value]

    m = 1 / params.well_capitalized_ratio
    candidates: list[Fraction] = []
    # No instruments countable at all (always a valid lower regime).
    candidates.append((equity_cash * m - weighted_base) / weight)
    # All instrument book value countable (cap slack).
    candidates.append(((equity_cash + books) * m - weighted_base) / weight)
    # Cap-binding regime: rwa <= (equity_cash + c*rwa) * m.
    c = (
        params.tier2_cap_share / params.adequate_ratio
        if params.adequate_ratio != 0 and params.tier2_cap_share != 0
        else Fraction(0)
    )
    if params.adequate_ratio != 0 and books > 0 and c > 0:
        if c * m < 1:
            candidates.append(
                (equity_cash * m / (1 - c * m) - weighted_base) / weight
            )
        # Edge of the binding regime.
        candidates.append((books / c - weighted_base) / weight)

    best = 0 if _capital_constraint_ok(
        weighted_base, weight, 0, equity_cash, books, params
    ) else -1
    # The RWA ceiling can push feasibility down by up to 1/weight units
    # past each fractional boundary.
    slop = ceil_frac(1 / weight) + 2
    for cand in candidates:
        p = floor_frac(cand)
        for _ in range(slop):
            if p <= best:
                break
            if p >= 0 and _capital_constraint_ok(
                weighted_base, weight, p, equity_cash, books, params
            ):
                best = max(best, p)
                break
            p -= 1
    if best < 0:
        return 0
    return best


def lending_headroom(
    state: SystemState,
    bank: BankState,
    params: RegulatoryParams,
    kind: LoanKind = LoanKind.MORTGAGE,
) -> Money:
    """Largest additional principal the bank may originate.

    Binding constraints, both evaluated on the post-lend position:
      reserves: cash - P >= required reserves on current deposits
      capital:  risk assets incl. the new loan stay within the
                well-capitalized multiple of countable equity
    """
    reserve_bound = bank.cash - required_reserves(bank, params)
    capital_bound = _capital_bound(state, bank, params, kind)
    if capital_bound is None:
        bound = reserve_bound
    else:
        bound = min(reserve_bound, capital_bound)
    return max(0, bound)
