"""Deterministic scenario executor.

Events are applied in order to a single mutable SystemState; a metrics
snapshot is recorded after every event, and every structural invariant is
re-checked.  Replaying the same event list from the same initial state
yields bit-identical states and series.

Some event parameters resolve against the live state so that generator
scripts stay closed-form:

  * originate amount "headroom" lends the bank's full current headroom;
  * sell price "face" prices a tranche at the whole security's
    outstanding face;
  * securitize loans "book" wraps everything on the bank's book, and a
    {"retained_share": Fraction} tranche spec splits it into a senior
    tranche plus a floor-rounded retained slice;
  * bonus amount "share:<ratio>:<security>:<tranche>" pays a floor-rounded
    share of a tranche's current face out of equity cash.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import instruments
from .errors import InvariantViolation, RegulatoryBreach
from .ledger import (
    AccountKind,
    LoanKind,
    SystemState,
    add_account,
    create_bank,
    transfer,
    verify_state,
)
from .metrics import BreachRecord, MetricsSeries, take_snapshot
from .money import Money, floor_frac
from .regulation import RegulatoryParams, lending_headroom


@dataclass(frozen=True)
class Event:
    op: str
    params: dict[str, Any] = field(default_factory=dict)
    override_regulation: bool = False
    label: str = ""

    def display(self) -> str:
        return self.label or self.op


def _resolve_amount(state: SystemState, bank_id: str, value, params, kind) -> Money:
    if value == "headroom":
        return lending_headroom(state, state.bank(bank_id), params, kind)
    return int(value)


def _resolve_loans(state: SystemState, bank_id: str, value) -> list[str]:
    if value == "book":
        return sorted(state.bank(bank_id).held_loans)
    return list(value)


def _resolve_tranches(
    state: SystemState, loans: list[str], value
) -> list[tuple[str, Money]] | None:
    if value is None:
        return None
    if isinstance(value, dict) and "retained_share" in value:
        total = sum(state.loans[lid].principal for lid in loans)
        retained = floor_frac(Fraction(value["retained_share"]) * total)
        return [("senior", total - retained), ("retained", retained)]
    return [(label, int(face)) for label, face in value]


def _resolve_price(state: SystemState, security_id: str, value) -> Money:
    if value == "face":
        return state.securities[security_id].outstanding()
    return int(value)


def _resolve_bonus(state: SystemState, value) -> Money:
    if isinstance(value, str) and value.startswith("share:"):
        _, ratio, security_id, label = value.split(":")
        face = state.securities[security_id].tranche(label).face
        return floor_frac(Fraction(ratio) * face)
    return int(value)


def _op_noop(state, params, p, override):
    pass


def _op_transfer(state, params, p, override):
    transfer(state, p["from"], p["to"], int(p["amount"]))


def _op_originate(state, params, p, override):
    kind = LoanKind(p.get("kind", "mortgage"))
    amount = _resolve_amount(state, p["bank"], p["amount"], params, kind)
    instruments.originate_loan(
        state,
        p["bank"],
        kind,
        amount,
        p["to"],
        params,
        override_regulation=override,
        loan_id=p.get("id"),
    )


def _op_securitize(state, params, p, override):
    loans = _resolve_loans(state, p["bank"], p.get("loans", "book"))
    tranches = _resolve_tranches(state, loans, p.get("tranches"))
    instruments.securitize(
        state, p["bank"], loans, tranches, security_id=p.get("id")
    )


def _op_sell(state, params, p, override):
    price = _resolve_price(state, p["security"], p["price"])
    instruments.sell_security(
        state, p["security"], p.get("tranche", "senior"), p["buyer"], price
    )


def _op_book_equity(state, params, p, override):
    instruments.book_security_to_equity(
        state, p["bank"], p["security"], p.get("tranche", "retained"), params
    )


def _op_bonus(state, params, p, override):
    amount = _resolve_bonus(state, p["amount"])
    instruments.pay_bonus(state, p["bank"], amount, p["to"])


def _op_repay(state, params, p, override):
    instruments.repay_loan(state, p["loan"], int(p["amount"]), p["payer"], params)


def _op_interest(state, params, p, override):
    instruments.pay_interest(state, p["loan"], int(p["amount"]), p["payer"])


def _op_default(state, params, p, override):
    instruments.default_loan(state, p["loan"], int(p["loss"]), params)


EVENT_OPS: dict[str, Callable] = {
    "noop": _op_noop,
    "transfer": _op_transfer,
    "originate": _op_originate,
    "securitize": _op_securitize,
    "sell": _op_sell,
    "book_equity": _op_book_equity,
    "bonus": _op_bonus,
    "repay": _op_repay,
    "interest": _op_interest,
    "default": _op_default,
}


def apply_event(state: SystemState, event: Event, params: RegulatoryParams):
    """Apply one event in place.  Raises on malformed events; regulatory
    refusals bubble up as RegulatoryBreach for the caller to record."""
    handler = EVENT_OPS.get(event.op)
    if handler is None:
        raise ValueError(f"unknown event op {event.op!r}")
    handler(state, params, event.params, event.override_regulation)
    state.clock += 1
    verify_state(state)


def run_events(
    state: SystemState,
    events: list[Event],
    params: RegulatoryParams,
) -> MetricsSeries:
    """Execute an event list, snapshotting after every event.

    Regulatory refusals leave the state unchanged and are recorded; an
    invariant violation poisons the run (partial series returned with the
    failure marker set) because it is a bug, never data.
    """
    series = MetricsSeries()
    if state.initial_total_cash is None:
        state.seal_initial_cash()
    try:
        verify_state(state)
    except InvariantViolation as exc:
        series.failed = True
        series.failure_reason = str(exc)
        return series
    series.snapshots.append(take_snapshot(state, params, 0, "initial"))
    for event in events:
        try:
            apply_event(state, event, params)
            label = event.display()
        except RegulatoryBreach as exc:
            series.breaches.append(
                BreachRecord(state.clock, event.display(), str(exc))
            )
            state.record("breach-refused", f"{event.display()}: {exc}")
            state.clock += 1
            label = f"{event.display()} (refused)"
        except InvariantViolation as exc:
            series.failed = True
            series.failure_reason = str(exc)
            return series
        series.snapshots.append(
            take_snapshot(state, params, state.clock, label)
        )
    return series


# -- canned scenario builders -------------------------------------------------


def two_bank_state(
    lender: str = "A",
    depositor: str = "B",
    lender_deposits: Money = 100_000,
    lender_equity: Money = 10_000,
    depositor_deposits: Money = 10_000,
    depositor_equity: Money = 10_000,
    employee_account: bool = True,
) -> SystemState:
    """Two banks ready for the worked scenarios.

    The canonical setup origination (lender lends to the depositor bank's
    aggregate account) is emitted by the generators, not here, so a
    zero-cycle run reports the pre-loan state faithfully.
    """
    state = SystemState()
    create_bank(state, lender, lender_deposits, lender_equity)
    create_bank(state, depositor, depositor_deposits, depositor_equity)
    if employee_account:
        add_account(state, lender, f"{lender}:employee", AccountKind.NET_TRANSACTION, 0)
    state.seal_initial_cash()
    return state


def loophole1_events(
    cycles: int,
    lender: str = "A",
    deposit_account: str = "B:deposits",
    amount: Money = 90_000,
    kind: LoanKind = LoanKind.MORTGAGE,
    include_setup: bool = True,
) -> list[Event]:
    """Securitize-sell-relend cycle: debt grows without bound, money does not.

    Each cycle wraps the current book, sells it at face to the depositor,
    and relends the same principal; bank balance sheets return to their
    starting position while the stock of externally held securities grows.
    """
    events: list[Event] = []
    if include_setup:
        events.append(
            Event(
                "originate",
                {"bank": lender, "kind": kind.value, "amount": amount, "to": deposit_account},
                label="setup-originate",
            )
        )
    for c in range(1, cycles + 1):
        sid = f"mbs{c}"
        events.append(
            Event("securitize", {"bank": lender, "loans": "book", "id": sid},
                  label=f"securitize[{c}]")
        )
        events.append(
            Event(
                "sell",
                {"security": sid, "tranche": "senior", "buyer": deposit_account,
                 "price": "face"},
                label=f"sell[{c}]",
            )
        )
        events.append(
            Event(
                "originate",
                {"bank": lender, "kind": kind.value, "amount": amount,
                 "to": deposit_account},
                label=f"originate[{c}]",
            )
        )
    return events


def loophole2_events(
    cycles: int,
    lender: str = "A",
    deposit_account: str = "B:deposits",
    bonus_account: str = "A:employee",
    amount: Money = 90_000,
    retained_share: Fraction = Fraction(1, 18),
    bonus_share: Fraction = Fraction(1, 5),
    kind: LoanKind = LoanKind.MORTGAGE,
    include_setup: bool = True,
) -> list[Event]:
    """Equity-recycling cycle: retained tranches become regulatory capital.

    Each cycle securitizes the book into senior + retained tranches, sells
    the senior tranche at the full package face, books the retained slice
    into equity capital, pays a bonus out of equity cash, then lends the
    full refreshed headroom.  Money supply and equity capital both rise
    every cycle until equity cash can no longer fund the bonus.
    """
    events: list[Event] = []
    if include_setup:
        events.append(
            Event(
                "originate",
                {"bank": lender, "kind": kind.value, "amount": amount, "to": deposit_account},
                label="setup-originate",
            )
        )
    for c in range(1, cycles + 1):
        sid = f"mbs{c}"
        events.append(
            Event(
                "securitize",
                {"bank": lender, "loans": "book", "id": sid,
                 "tranches": {"retained_share": retained_share}},
                label=f"securitize[{c}]",
            )
        )
        events.append(
            Event(
                "sell",
                {"security": sid, "tranche": "senior", "buyer": deposit_account,
                 "price": "face"},
                label=f"sell[{c}]",
            )
        )
        events.append(
            Event(
                "book_equity",
                {"bank": lender, "security": sid, "tranche": "retained"},
                label=f"book-equity[{c}]",
            )
        )
        events.append(
            Event(
                "bonus",
                {"bank": lender, "amount": f"share:{bonus_share}:{sid}:retained",
                 "to": bonus_account},
                label=f"bonus[{c}]",
            )
        )
        events.append(
            Event(
                "originate",
                {"bank": lender, "kind": kind.value, "amount": "headroom",
                 "to": deposit_account},
                label=f"lend-headroom[{c}]",
            )
        )
    return events


def run_loophole1(
    cycles: int, params: RegulatoryParams | None = None
) -> tuple[SystemState, MetricsSeries]:
    params = params or RegulatoryParams()
    state = two_bank_state(employee_account=False)
    series = run_events(state, loophole1_events(cycles), params)
    return state, series


def run_loophole2(
    cycles: int,
    params: RegulatoryParams | None = None,
    retained_share: Fraction = Fraction(1, 18),
    bonus_share: Fraction = Fraction(1, 5),
) -> tuple[SystemState, MetricsSeries]:
    params = params or RegulatoryParams()
    state = two_bank_state()
    events = loophole2_events(
        cycles, retained_share=retained_share, bonus_share=bonus_share
    )
    series = run_events(state, events, params)
    return state, series


# -- textbook redeposit expansion ---------------------------------------------


@dataclass(frozen=True)
class ExpansionRow:
    round: int
    money: Money
    loans: Money


@dataclass(frozen=True)
class ExpansionSeries:
    rows: tuple[ExpansionRow, ...]
    limit_money: Money
    limit_loans: Money


def textbook_expansion(
    initial_deposit: Money, reserve_ratio: Fraction, rounds: int
) -> ExpansionSeries:
    """Recursive redeposit expansion under a reserve requirement.

    Each round lends (1 - r) times the previous round's deposit and
    redeposits the proceeds.  The recursion runs in exact rationals; each
    reported round total is floored to whole minor units.  The limiting
    totals (initial / r) are reported alongside.
    """
    if not 0 < reserve_ratio <= 1:
        raise ValueError("reserve ratio must lie in (0, 1]")
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    deposit = Fraction(initial_deposit)
    money = Fraction(initial_deposit)
    loans = Fraction(0)
    rows = [ExpansionRow(0, floor_frac(money), floor_frac(loans))]
    for k in range(1, rounds + 1):
        lent = (1 - reserve_ratio) * deposit
        loans += lent
        money += lent
        deposit = lent
        rows.append(ExpansionRow(k, floor_frac(money), floor_frac(loans)))
    limit_money = floor_frac(Fraction(initial_deposit) / reserve_ratio)
    return ExpansionSeries(
        rows=tuple(rows),
        limit_money=limit_money,
        limit_loans=limit_money - initial_deposit,
    )
