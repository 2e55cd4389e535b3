import random
from fractions import Fraction

import pytest

from reservesim import (
    AccountKind,
    Capitalization,
    LoanKind,
    RegulatoryParams,
    SystemState,
    add_account,
    create_bank,
)
from reservesim.ledger import OWNER_EQUITY, Security, Tranche
from reservesim.money import ceil_frac
from reservesim.regulation import (
    capital_ratio,
    classify_capitalization,
    equity_capital_total,
    lending_headroom,
    required_reserves,
    risk_weighted_assets,
)

from helpers import bank_with_book, units

PARAMS = RegulatoryParams()


def book_instrument(state, bank_id, face, book_value, sec_id="mbsX"):
    """Install an already-booked equity tranche directly."""
    bank = state.bank(bank_id)
    security = Security(
        id=sec_id, issuer=bank_id, backing_loans=(), face_value=face, placed=True,
        tranches=[Tranche("retained", face, (OWNER_EQUITY, bank_id), book_value)],
    )
    state.securities[sec_id] = security
    bank.equity_instruments[f"{sec_id}:retained"] = book_value


class TestRequiredReserves:
    def test_ten_percent_of_thousand(self):
        state = SystemState()
        create_bank(state, "A", units(1000), 0)
        assert required_reserves(state.bank("A"), PARAMS) == units(100)

    def test_ten_percent_of_1010(self):
        state = SystemState()
        create_bank(state, "A", units(1010), 0)
        assert required_reserves(state.bank("A"), PARAMS) == units(101)

    def test_empty_bank(self):
        state = SystemState()
        create_bank(state, "A", 0, 0)
        assert required_reserves(state.bank("A"), PARAMS) == 0

    def test_rounds_up(self):
        state = SystemState()
        create_bank(state, "A", 1005, 0)  # minor units directly
        assert required_reserves(state.bank("A"), PARAMS) == 101

    def test_only_net_transaction_accounts_count(self):
        state = SystemState()
        create_bank(state, "A", units(1000), 0)
        add_account(state, "A", "A:time", AccountKind.OTHER, 0)
        state.bank("A").accounts["A:time"].balance = units(500)
        state.bank("A").cash += units(500)
        assert required_reserves(state.bank("A"), PARAMS) == units(100)


class TestRiskWeightedAssets:
    def test_mortgage_at_half_weight(self):
        state = SystemState()
        bank_with_book(state, "A", 1000, 900, 100, kind=LoanKind.MORTGAGE)
        assert risk_weighted_assets(state, state.bank("A"), PARAMS) == units(450)

    def test_other_at_full_weight(self):
        state = SystemState()
        bank_with_book(state, "A", 1000, 900, 100, kind=LoanKind.OTHER)
        assert risk_weighted_assets(state, state.bank("A"), PARAMS) == units(900)

    def test_empty_book(self):
        state = SystemState()
        create_bank(state, "A", units(1000), 0)
        assert risk_weighted_assets(state, state.bank("A"), PARAMS) == 0

    def test_rounds_up_on_total(self):
        state = SystemState()
        bank = create_bank(state, "A", 101, 0)
        from reservesim.ledger import HOLDER_BANK, LoanRecord

        state.loans["l1"] = LoanRecord("l1", 101, LoanKind.MORTGAGE, "A", (HOLDER_BANK, "A"))
        bank.held_loans.add("l1")
        bank.cash -= 101
        assert risk_weighted_assets(state, bank, PARAMS) == 51  # ceil(50.5)


class TestEquityCapitalTotal:
    def test_booked_tranche_counts_at_half_value(self):
        # The post-bonus position: equity cash 90, 50-face tranche booked
        # at 25, a 909 mortgage book providing Tier-2 room.
        state = SystemState()
        bank_with_book(state, "A", 1010, 909, 90)
        book_instrument(state, "A", units(50), units(25))
        assert equity_capital_total(state, state.bank("A"), PARAMS) == units(115)

    def test_cash_only(self):
        state = SystemState()
        create_bank(state, "A", 0, units(100))
        assert equity_capital_total(state, state.bank("A"), PARAMS) == units(100)

    def test_cap_binds_at_zero_rwa_without_cash(self):
        state = SystemState()
        create_bank(state, "A", 0, 0)
        book_instrument(state, "A", units(50), units(25))
        assert equity_capital_total(state, state.bank("A"), PARAMS) == 0

    def test_excess_book_value_counts_zero(self):
        # Tier-2 room is half of RWA: book value past it is ignored.
        state = SystemState()
        bank_with_book(state, "A", 1000, 100, 10)  # RWA 50, room 25
        book_instrument(state, "A", units(80), units(40))
        assert equity_capital_total(state, state.bank("A"), PARAMS) == units(10 + 25)


class TestClassification:
    def test_initial_lender_is_well_capitalized(self):
        state = SystemState()
        bank_with_book(state, "A", 1000, 900, 100)
        assert capital_ratio(state, state.bank("A"), PARAMS) == Fraction(units(100), units(450))
        assert classify_capitalization(state, state.bank("A"), PARAMS) is Capitalization.WELL

    def test_zero_rwa_is_well(self):
        state = SystemState()
        create_bank(state, "A", 0, units(100))
        assert classify_capitalization(state, state.bank("A"), PARAMS) is Capitalization.WELL

    def test_seven_percent_is_under(self):
        state = SystemState()
        bank_with_book(state, "A", 1000, 100, 7, kind=LoanKind.OTHER)
        assert classify_capitalization(state, state.bank("A"), PARAMS) is Capitalization.UNDER

    def test_adequate_band(self):
        state = SystemState()
        bank_with_book(state, "A", 1000, 100, 9, kind=LoanKind.OTHER)
        assert classify_capitalization(state, state.bank("A"), PARAMS) is Capitalization.ADEQUATE


def headroom_oracle(state, bank, params, kind):
    """Independent bound: binary search the joint post-lend predicate."""
    def ok(p):
        if bank.cash - p < required_reserves(bank, params):
            return False
        weighted = Fraction(0)
        for lid in bank.held_loans:
            loan = state.loans[lid]
            weighted += params.weight(loan.kind) * loan.principal
        rwa = ceil_frac(weighted + params.weight(kind) * p)
        cap = (
            params.tier2_cap_share / params.adequate_ratio * rwa
            if params.adequate_ratio
            else None
        )
        books = sum(bank.equity_instruments.values())
        countable = books if cap is None else min(books, int(cap))
        equity = bank.equity_cash + countable
        return Fraction(rwa) <= Fraction(equity) / params.well_capitalized_ratio

    lo, hi = 0, bank.cash + 1
    if not ok(0):
        return 0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        lo, hi = (mid, hi) if ok(mid) else (lo, mid - 1)
    return lo


class TestLendingHeadroom:
    def test_freed_book_allows_900(self):
        # Lender after selling its book: deposits 1000, cash 1000, equity 100.
        state = SystemState()
        bank_with_book(state, "A", 1000, 0, 100)
        assert lending_headroom(state, state.bank("A"), PARAMS) == units(900)

    def test_post_bonus_allows_909(self):
        state = SystemState()
        bank_with_book(state, "A", 1010, 0, 90)
        book_instrument(state, "A", units(50), units(25))
        assert lending_headroom(state, state.bank("A"), PARAMS) == units(909)

    def test_zero_equity_means_zero(self):
        state = SystemState()
        bank_with_book(state, "A", 1000, 0, 0)
        assert lending_headroom(state, state.bank("A"), PARAMS) == 0

    def test_capital_constraint_binds_small_equity(self):
        state = SystemState()
        bank_with_book(state, "A", 1000, 0, 10)
        # capital: P/2 <= 10 * 10 -> P <= 200; reserves would allow 900.
        assert lending_headroom(state, state.bank("A"), PARAMS) == units(200)

    def test_matches_oracle_on_random_states(self):
        rng = random.Random(20121)
        for case in range(300):
            state = SystemState()
            deposits = rng.randrange(0, 5000)
            loans = rng.randrange(0, deposits + 1)
            equity = rng.randrange(0, 600)
            kind = rng.choice([LoanKind.MORTGAGE, LoanKind.OTHER])
            bank_with_book(state, "A", deposits, loans, equity, kind=kind)
            if rng.random() < 0.5:
                face = rng.randrange(0, 200) * 100
                book_instrument(state, "A", face, face // 2)
            new_kind = rng.choice([LoanKind.MORTGAGE, LoanKind.OTHER])
            bank = state.bank("A")
            expected = headroom_oracle(state, bank, PARAMS, new_kind)
            assert lending_headroom(state, bank, PARAMS, new_kind) == expected, (
                f"case {case}: deposits={deposits} loans={loans} equity={equity}"
            )

    def test_monotone_in_equity_and_cash(self):
        rng = random.Random(77)
        for _ in range(100):
            state = SystemState()
            deposits = rng.randrange(100, 3000)
            loans = rng.randrange(0, deposits)
            equity = rng.randrange(0, 300)
            bank_with_book(state, "A", deposits, loans, equity)
            bank = state.bank("A")
            base = lending_headroom(state, bank, PARAMS)
            bank.equity_cash += units(10)
            assert lending_headroom(state, bank, PARAMS) >= base
            bank.equity_cash -= units(10)
            bank.cash += units(10)
            bank.accounts["A:deposits"].balance += units(10)  # keep identity
            richer = lending_headroom(state, bank, PARAMS)
            bank.cash -= units(10)
            bank.accounts["A:deposits"].balance -= units(10)
            # More cash never hurts even with the extra reserve it attracts.
            assert richer >= base - units(1)

    def test_reduces_to_plain_equity_multiple(self):
        # Uniform weights and no Tier-2 allowance: ten times equity cash.
        params = RegulatoryParams(
            risk_weight_mortgage=Fraction(1),
            risk_weight_other=Fraction(1),
            tier2_cap_share=Fraction(0),
        )
        state = SystemState()
        bank_with_book(state, "A", 5000, 400, 100)
        bank = state.bank("A")
        capital_room = units(100) * 10 - units(400)
        reserve_room = bank.cash - units(500)
        assert lending_headroom(state, bank, params) == min(capital_room, reserve_room)

    def test_zero_tier2_share_ignores_booked_instruments(self):
        params = RegulatoryParams(tier2_cap_share=Fraction(0))
        state = SystemState()
        bank_with_book(state, "A", 20000, 0, 100)
        book_instrument(state, "A", units(500), units(250))
        bank = state.bank("A")
        # Equity cash alone supports P/2 <= 10 * 100, so P <= 2000.
        assert lending_headroom(state, bank, params) == units(2000)

    def test_unlimited_tier2_when_no_adequacy_floor(self):
        params = RegulatoryParams(adequate_ratio=Fraction(0))
        state = SystemState()
        bank_with_book(state, "A", 20000, 0, 100)
        book_instrument(state, "A", units(500), units(250))
        bank = state.bank("A")
        # All 250 of book value counts: P/2 <= 10 * 350, so P <= 7000.
        assert lending_headroom(state, bank, params) == units(7000)

    PARAM_GRID = [
        RegulatoryParams(),
        RegulatoryParams(tier2_cap_share=Fraction(0)),
        RegulatoryParams(adequate_ratio=Fraction(0)),
        RegulatoryParams(  # cap regime with c*m < 1
            tier2_cap_share=Fraction(1, 100),
            adequate_ratio=Fraction(8, 100),
            well_capitalized_ratio=Fraction(1, 2),
        ),
        RegulatoryParams(
            well_capitalized_ratio=Fraction(1, 20),
            risk_weight_mortgage=Fraction(35, 100),
        ),
        RegulatoryParams(reserve_ratio=Fraction(0)),
    ]

    def test_headroom_is_pointwise_supremum_across_param_regimes(self):
        # After lending the reported headroom the constraints hold, and no
        # larger principal ever satisfies them again (past the supremum the
        # risk base only grows).
        from reservesim.money import ceil_frac
        from reservesim.regulation import required_reserves as req

        rng = random.Random(5150)
        for case in range(200):
            params = rng.choice(self.PARAM_GRID)
            state = SystemState()
            deposits = rng.randrange(0, 3000)
            loans = rng.randrange(0, deposits + 1)
            equity = rng.randrange(0, 400)
            bank_with_book(state, "A", deposits, loans, equity)
            if rng.random() < 0.6:
                face = rng.randrange(0, 300) * 100
                book_instrument(state, "A", face, face // 2)
            bank = state.bank("A")
            kind = rng.choice(list(LoanKind))
            headroom = lending_headroom(state, bank, params, kind)

            def ok(p):
                if bank.cash - p < req(bank, params):
                    return False
                weighted = Fraction(0)
                for lid in bank.held_loans:
                    loan = state.loans[lid]
                    weighted += params.weight(loan.kind) * loan.principal
                rwa = ceil_frac(weighted + params.weight(kind) * p)
                books = sum(bank.equity_instruments.values())
                if params.tier2_cap_share == 0:
                    countable = 0
                elif params.adequate_ratio == 0:
                    countable = books
                else:
                    cap = params.tier2_cap_share / params.adequate_ratio * rwa
                    countable = min(books, int(cap))
                equity_total = bank.equity_cash + countable
                return (
                    Fraction(rwa)
                    <= Fraction(equity_total) / params.well_capitalized_ratio
                )

            if headroom > 0:
                assert ok(headroom), f"case {case}: headroom not feasible"
            for delta in list(range(1, 200)) + [10**3, 10**4, 10**6, 10**9]:
                assert not ok(headroom + delta), (
                    f"case {case}: {headroom}+{delta} still feasible"
                )


class TestParams:
    def test_ratio_bounds_enforced(self):
        with pytest.raises(ValueError):
            RegulatoryParams(reserve_ratio=Fraction(3, 2))

    def test_overrides(self):
        params = PARAMS.with_overrides({"reserve_ratio": "1/5"})
        assert params.reserve_ratio == Fraction(1, 5)
        with pytest.raises(ValueError):
            PARAMS.with_overrides({"nope": "1"})
