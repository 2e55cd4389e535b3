"""Why it matters where a loan lives when it is repaid.

Repaying a bank-held loan destroys the deposit that funded it: the money
supply shrinks by the full repayment.  Once the loan has been securitized
and sold outside the banking system, the same repayment is an ordinary
transfer between accounts and the money supply does not move.

Defaults run the other direction: equity absorbs losses before any
depositor does.
"""

import _path  # noqa: F401

from reservesim import (
    LoanKind,
    RegulatoryParams,
    SystemState,
    create_bank,
    default_loan,
    money_supply,
    originate_loan,
    repay_loan,
    securitize,
    sell_security,
)
from reservesim.money import format_amount

params = RegulatoryParams()


def fresh_pair():
    state = SystemState()
    create_bank(state, "A", 100_000, 10_000)
    create_bank(state, "B", 10_000, 10_000)
    state.seal_initial_cash()
    loan = originate_loan(state, "A", LoanKind.MORTGAGE, 90_000, "B:deposits", params)
    return state, loan


print("-- bank-held repayment --")
state, loan = fresh_pair()
print("money before:", format_amount(money_supply(state)))
repay_loan(state, loan.id, 90_000, "B:deposits", params)
print("money after full repayment:", format_amount(money_supply(state)))
print("(the 900 deposit and the 900 loan annihilated each other)")

print()
print("-- securitized repayment --")
state, loan = fresh_pair()
security = securitize(state, "A", [loan.id])
sell_security(state, security.id, "senior", "B:deposits", 90_000)
print("money after the sale:", format_amount(money_supply(state)))
repay_loan(state, loan.id, 9_000, "B:deposits", params)
print("money after repaying 90:", format_amount(money_supply(state)), "(unchanged)")

print()
print("-- default waterfall --")
state, loan = fresh_pair()
bank = state.bank("A")
print("equity cash before:", format_amount(bank.equity_cash))
default_loan(state, loan.id, 6_000, params)
print("equity cash after a 60 loss:", format_amount(bank.equity_cash))
print("depositor balances after the loss:", format_amount(bank.deposits_total()))
print("(losses come out of equity first; depositors are untouched)")
