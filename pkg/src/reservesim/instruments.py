"""Loan and security lifecycle operations.

Money-supply behaviour differs by instrument:

  * originating a loan creates deposit money; repaying a bank-held loan
    destroys it;
  * selling a securitized package moves the backing loans outside the
    banking system, after which repayments are ordinary transfers and the
    money supply is untouched.

Placement is the key transition.  A freshly created security is a pending
wrapper: its backing loans stay on the issuer's book and keep their
reserve/capital treatment.  The first disposal (sale of any tranche, or
booking one into equity) "places" the security: the entire backing leaves
the loan book, the issuer's cash absorbs the face value, and any pricing
difference against face settles through equity cash as realized profit or
loss.  Tranches the issuer keeps become off-book holdings until booked
into equity capital.
"""

from __future__ import annotations

from .errors import (
    InsufficientBalance,
    InsufficientCash,
    InsufficientEquityCash,
    InvalidOperation,
    RegulatoryBreach,
    UnknownLoan,
    UnknownSecurity,
)
from .ledger import (
    HOLDER_BANK,
    HOLDER_SECURITY,
    OWNER_BANK,
    OWNER_EQUITY,
    OWNER_EXTERNAL,
    BankState,
    LoanKind,
    LoanRecord,
    LoanStatus,
    Security,
    SystemState,
    Tranche,
    check_balance_identity,
    move_deposit,
)
from .money import Money, floor_frac
from .regulation import RegulatoryParams, lending_headroom


def _prorate(total: Money, weights: list[Money]) -> list[Money]:
    """Split `total` across `weights` exactly: floor shares, remainder in order."""
    base = sum(weights)
    if base == 0:
        return [0] * len(weights)
    shares = [total * w // base for w in weights]
    remainder = total - sum(shares)
    i = 0
    while remainder > 0:
        if weights[i] > 0:
            shares[i] += 1
            remainder -= 1
        i = (i + 1) % len(weights)
    return shares


def _get_loan(state: SystemState, loan_id: str) -> LoanRecord:
    loan = state.loans.get(loan_id)
    if loan is None:
        raise UnknownLoan(f"no loan {loan_id!r}")
    return loan


def _get_security(state: SystemState, security_id: str) -> Security:
    security = state.securities.get(security_id)
    if security is None:
        raise UnknownSecurity(f"no security {security_id!r}")
    return security


# -- loans -------------------------------------------------------------------


def originate_loan(
    state: SystemState,
    bank_id: str,
    kind: LoanKind,
    amount: Money,
    proceeds_account: str,
    params: RegulatoryParams,
    override_regulation: bool = False,
    loan_id: str | None = None,
) -> LoanRecord:
    """Create a loan against deposits; proceeds are deposited at once.

    The deposit created is new money.  Refused with RegulatoryBreach when
    the principal exceeds the bank's lending headroom, unless the override
    flag is set (the override is recorded in the audit log).
    """
    bank = state.bank(bank_id)
    if amount <= 0:
        raise InvalidOperation("loan principal must be positive")
    recipient = state.account(proceeds_account)

    headroom = lending_headroom(state, bank, params, kind)
    if amount > headroom:
        if not override_regulation:
            raise RegulatoryBreach(
                f"bank {bank_id!r} headroom {headroom}, requested {amount}",
                headroom=headroom,
                requested=amount,
            )
        state.record(
            "override", f"bank {bank_id} lent {amount} past headroom {headroom}"
        )

    if recipient.bank != bank_id and bank.cash < amount:
        raise InsufficientCash(
            f"bank {bank_id!r} cannot settle loan proceeds of {amount}"
        )

    lid = loan_id or state.new_loan_id()
    if lid in state.loans:
        raise InvalidOperation(f"loan id {lid!r} already in use")
    loan = LoanRecord(
        id=lid,
        principal=amount,
        kind=kind,
        originator=bank_id,
        holder=(HOLDER_BANK, bank_id),
    )
    state.loans[lid] = loan
    bank.held_loans.add(lid)

    recipient.balance += amount
    if recipient.bank != bank_id:
        bank.cash -= amount
        state.bank(recipient.bank).cash += amount

    check_balance_identity(state, bank_id, raise_on_fail=True)
    check_balance_identity(state, recipient.bank, raise_on_fail=True)
    return loan


def repay_loan(
    state: SystemState,
    loan_id: str,
    amount: Money,
    payer_account: str,
    params: RegulatoryParams,
) -> None:
    """Pay down principal.

    Bank-held: the payer's deposit is destroyed together with the loan
    asset (money supply falls by the amount).  Securitized: an ordinary
    transfer to the package owners, money supply unchanged for externally
    held tranches.
    """
    loan = _get_loan(state, loan_id)
    if amount == 0:
        return
    if amount < 0:
        raise InvalidOperation("repayment must be non-negative")
    if loan.status is not LoanStatus.PERFORMING:
        raise InvalidOperation(f"loan {loan_id!r} is {loan.status.value}")
    if amount > loan.principal:
        raise InvalidOperation(
            f"repayment {amount} exceeds outstanding {loan.principal}"
        )
    payer = state.account(payer_account)
    if payer.balance < amount:
        raise InsufficientBalance(
            f"account {payer_account!r} holds {payer.balance}, needs {amount}"
        )

    tag, ref = loan.holder
    if tag == HOLDER_BANK:
        holder_bank = state.bank(ref)
        payer_bank = state.bank(payer.bank)
        if payer.bank != ref:
            if payer_bank.cash < amount:
                raise InsufficientCash(
                    f"bank {payer.bank!r} cannot settle repayment of {amount}"
                )
            payer_bank.cash -= amount
            holder_bank.cash += amount
        payer.balance -= amount
        loan.principal -= amount
        if loan.principal == 0:
            loan.status = LoanStatus.REPAID
            holder_bank.held_loans.discard(loan_id)
        check_balance_identity(state, payer.bank, raise_on_fail=True)
        check_balance_identity(state, ref, raise_on_fail=True)
        return

    security = _get_security(state, ref)
    if not security.placed:
        raise InvalidOperation(
            f"security {ref!r} is pending; its loans settle as bank-held"
            " only after placement is reversed, which is not supported"
        )
    _distribute_to_tranches(state, security, amount, payer_account, params)
    loan.principal -= amount
    if loan.principal == 0:
        loan.status = LoanStatus.REPAID


def _distribute_to_tranches(
    state: SystemState,
    security: Security,
    amount: Money,
    payer_account: str,
    params: RegulatoryParams,
) -> None:
    tranches = security.tranches
    shares = _prorate(amount, [t.face for t in tranches])
    payer = state.account(payer_account)
    payer_bank = state.bank(payer.bank)

    # Validate the full cash leg before mutating anything: every share
    # leaving the payer's bank settles in cash.
    cash_out = 0
    for tranche, share in zip(tranches, shares):
        tag, ref = tranche.owner
        if tag == OWNER_EXTERNAL:
            if state.account(ref).bank != payer.bank:
                cash_out += share
        else:
            cash_out += share
    if payer_bank.cash < cash_out:
        raise InsufficientCash(
            f"bank {payer.bank!r} cannot settle repayment cash leg of {cash_out}"
        )

    for tranche, share in zip(tranches, shares):
        if share == 0:
            continue
        tag, ref = tranche.owner
        if tag == OWNER_EXTERNAL:
            move_deposit(state, payer_account, ref, share)
        else:
            # Principal returned on a tranche the bank itself holds flows
            # into equity cash; the payer's deposit is consumed.
            payer.balance -= share
            payer_bank.cash -= share
            state.bank(ref).equity_cash += share
        tranche.face -= share
        if tag == OWNER_EQUITY:
            _rebook(state.bank(ref), security, tranche, params)
    check_balance_identity(state, payer.bank, raise_on_fail=True)


def _rebook(
    bank: BankState, security: Security, tranche: Tranche, params: RegulatoryParams
) -> None:
    key = f"{security.id}:{tranche.label}"
    tranche.book_value = floor_frac(params.mbs_equity_valuation_weight * tranche.face)
    bank.equity_instruments[key] = tranche.book_value


def pay_interest(
    state: SystemState, loan_id: str, amount: Money, payer_account: str
) -> None:
    """Route an interest payment from the payer to the loan's holder.

    Interest on a bank-held loan is bank profit and lands in equity cash
    (the money supply shrinks by the amount); interest on an externally
    held package is an ordinary transfer.  Principal is untouched.  Off by
    default in every generator so the worked tables stay exact.
    """
    loan = _get_loan(state, loan_id)
    if amount == 0:
        return
    if amount < 0:
        raise InvalidOperation("interest must be non-negative")
    if loan.status is not LoanStatus.PERFORMING:
        raise InvalidOperation(f"loan {loan_id!r} is {loan.status.value}")
    payer = state.account(payer_account)
    if payer.balance < amount:
        raise InsufficientBalance(
            f"account {payer_account!r} holds {payer.balance}, needs {amount}"
        )
    payer_bank = state.bank(payer.bank)

    tag, ref = loan.holder
    if tag == HOLDER_BANK:
        if payer_bank.cash < amount:
            raise InsufficientCash(
                f"bank {payer.bank!r} cannot settle interest of {amount}"
            )
        payer.balance -= amount
        payer_bank.cash -= amount
        state.bank(ref).equity_cash += amount
        check_balance_identity(state, payer.bank, raise_on_fail=True)
        return

    security = _get_security(state, ref)
    if not security.placed:
        raise InvalidOperation(f"security {ref!r} is pending; cannot pay interest")
    shares = _prorate(amount, [t.face for t in security.tranches])
    cash_out = 0
    for tranche, share in zip(security.tranches, shares):
        owner_tag, owner_ref = tranche.owner
        if owner_tag == OWNER_EXTERNAL:
            if state.account(owner_ref).bank != payer.bank:
                cash_out += share
        else:
            cash_out += share
    if payer_bank.cash < cash_out:
        raise InsufficientCash(
            f"bank {payer.bank!r} cannot settle interest cash leg of {cash_out}"
        )
    for tranche, share in zip(security.tranches, shares):
        if share == 0:
            continue
        owner_tag, owner_ref = tranche.owner
        if owner_tag == OWNER_EXTERNAL:
            move_deposit(state, payer_account, owner_ref, share)
        else:
            payer.balance -= share
            payer_bank.cash -= share
            state.bank(owner_ref).equity_cash += share
    check_balance_identity(state, payer.bank, raise_on_fail=True)


def default_loan(
    state: SystemState, loan_id: str, loss: Money, params: RegulatoryParams
) -> None:
    """Write off part or all of a loan.

    Bank-held losses never touch depositor balances: equity cash covers
    the write-down first (moved into deposit-backing cash), then equity
    instrument book values absorb pro-rata.  Any portion not covered by
    equity cash is tracked as the bank's loss gap; when instruments cannot
    absorb it either, the bank is flagged failed and the residual recorded
    as a depositor shortfall event.
    """
    loan = _get_loan(state, loan_id)
    if loss == 0:
        return
    if loss < 0:
        raise InvalidOperation("loss must be non-negative")
    if loan.status is not LoanStatus.PERFORMING:
        raise InvalidOperation(f"loan {loan_id!r} is {loan.status.value}")
    if loss > loan.principal:
        raise InvalidOperation(f"loss {loss} exceeds outstanding {loan.principal}")

    tag, ref = loan.holder
    if tag == HOLDER_SECURITY:
        security = _get_security(state, ref)
        if not security.placed:
            raise InvalidOperation(f"security {ref!r} is pending; cannot default")
        shares = _prorate(loss, [t.face for t in security.tranches])
        for tranche, share in zip(security.tranches, shares):
            tranche.face -= share
            if tranche.owner[0] == OWNER_EQUITY:
                _rebook(state.bank(tranche.owner[1]), security, tranche, params)
        loan.principal -= loss
        if loan.principal == 0:
            loan.status = LoanStatus.DEFAULTED
        return

    bank = state.bank(ref)
    loan.principal -= loss
    if loan.principal == 0:
        loan.status = LoanStatus.DEFAULTED
        bank.held_loans.discard(loan_id)

    covered = min(loss, bank.equity_cash)
    bank.equity_cash -= covered
    bank.cash += covered
    gap = loss - covered
    if gap > 0:
        bank.loss_gap += gap
        books = sorted(bank.equity_instruments)
        values = [bank.equity_instruments[k] for k in books]
        absorbed = min(gap, sum(values))
        if absorbed > 0:
            cuts = _prorate(absorbed, values)
            for key, cut in zip(books, cuts):
                bank.equity_instruments[key] -= cut
                sec_id, _, label = key.partition(":")
                state.securities[sec_id].tranche(label).book_value -= cut
        shortfall = gap - absorbed
        if shortfall > 0:
            bank.failed = True
            state.record(
                "depositor-shortfall",
                f"bank {ref} equity exhausted; uncovered loss {shortfall}",
            )
    check_balance_identity(state, ref, raise_on_fail=True)


# -- securities --------------------------------------------------------------


def securitize(
    state: SystemState,
    bank_id: str,
    loan_ids: list[str],
    tranche_spec: list[tuple[str, Money]] | None = None,
    security_id: str | None = None,
) -> Security:
    """Wrap held loans into a security, split into tranches by face value.

    The security is pending until a tranche is first sold or booked:
    backing loans stay on the bank's book and keep their regulatory
    treatment until then.
    """
    bank = state.bank(bank_id)
    if not loan_ids:
        raise InvalidOperation("cannot securitize an empty loan set")
    total = 0
    for lid in loan_ids:
        loan = _get_loan(state, lid)
        if lid not in bank.held_loans:
            raise InvalidOperation(f"loan {lid!r} not held by bank {bank_id!r}")
        if loan.status is not LoanStatus.PERFORMING:
            raise InvalidOperation(f"loan {lid!r} is {loan.status.value}")
        if loan.holder[0] != HOLDER_BANK:
            raise InvalidOperation(f"loan {lid!r} already securitized")
        total += loan.principal

    if tranche_spec is None:
        tranche_spec = [("senior", total)]
    if any(face < 0 for _, face in tranche_spec):
        raise InvalidOperation("tranche faces must be non-negative")
    if sum(face for _, face in tranche_spec) != total:
        raise InvalidOperation(
            f"tranche faces must sum to backing principal {total}"
        )
    labels = [label for label, _ in tranche_spec]
    if len(set(labels)) != len(labels):
        raise InvalidOperation("tranche labels must be unique")
    if any(":" in label or not label for label in labels):
        raise InvalidOperation("tranche labels must be non-empty and avoid ':'")

    sid = security_id or state.new_security_id()
    if ":" in sid:
        # Security ids key equity holdings as "security:tranche".
        raise InvalidOperation(f"security id {sid!r} must avoid ':'")
    if sid in state.securities:
        raise InvalidOperation(f"security id {sid!r} already in use")
    security = Security(
        id=sid,
        issuer=bank_id,
        backing_loans=tuple(loan_ids),
        face_value=total,
        tranches=[
            Tranche(label=label, face=face, owner=(OWNER_BANK, bank_id))
            for label, face in tranche_spec
        ],
    )
    state.securities[sid] = security
    for lid in loan_ids:
        state.loans[lid].holder = (HOLDER_SECURITY, sid)
    return security


def _place_security(state: SystemState, security: Security, proceeds: Money) -> None:
    """Move the entire backing off the issuer's book.

    The issuer's cash absorbs the full backing face (keeping the balance
    identity), and the difference between sale proceeds and face settles
    through equity cash: a premium is realized profit, a discount is a
    loss the bank must be able to absorb.
    """
    issuer = state.bank(security.issuer)
    backing = sum(state.loans[lid].principal for lid in security.backing_loans)
    premium = proceeds - backing
    if premium < 0 and issuer.equity_cash + premium < 0:
        raise InsufficientEquityCash(
            f"bank {security.issuer!r} cannot absorb discount of {-premium}"
        )
    for lid in security.backing_loans:
        issuer.held_loans.discard(lid)
    issuer.cash += backing
    issuer.equity_cash += premium
    security.placed = True


def sell_security(
    state: SystemState,
    security_id: str,
    tranche_label: str,
    buyer_account: str,
    price: Money,
) -> None:
    """Sell a bank-owned tranche to a depositor.

    The buyer's deposit funds the purchase, so the money supply falls by
    the price while total system cash is unchanged.  The first sale places
    the security (see _place_security); later sales of retained tranches
    are pure equity-cash proceeds.
    """
    if price < 0:
        raise InvalidOperation("price must be non-negative")
    security = _get_security(state, security_id)
    tranche = security.tranche(tranche_label)
    tag, owner_ref = tranche.owner
    if tag == OWNER_EQUITY:
        raise InvalidOperation(
            f"tranche {security_id}:{tranche_label} is booked into equity capital"
        )
    if tag != OWNER_BANK:
        raise InvalidOperation(
            f"tranche {security_id}:{tranche_label} is not bank-owned"
        )
    seller = state.bank(owner_ref)

    buyer = state.account(buyer_account)
    if buyer.balance < price:
        raise InsufficientBalance(
            f"account {buyer_account!r} holds {buyer.balance}, needs {price}"
        )
    buyer_bank = state.bank(buyer.bank)

    # Validate both legs before mutating.
    placing = not security.placed
    backing = (
        sum(state.loans[lid].principal for lid in security.backing_loans)
        if placing
        else 0
    )
    if placing and price < backing and seller.equity_cash + price - backing < 0:
        raise InsufficientEquityCash(
            f"bank {owner_ref!r} cannot absorb discount of {backing - price}"
        )
    buyer_cash_after = buyer_bank.cash - price
    if buyer.bank == owner_ref and placing:
        buyer_cash_after += backing
    if buyer_cash_after < 0:
        raise InsufficientCash(
            f"bank {buyer.bank!r} cannot settle purchase of {price}"
        )

    # Debit the buyer: money leaves the deposit aggregate into bank cash.
    buyer.balance -= price
    buyer_bank.cash -= price

    if placing:
        _place_security(state, security, price)
    else:
        seller.equity_cash += price

    tranche.owner = (OWNER_EXTERNAL, buyer_account)
    check_balance_identity(state, buyer.bank, raise_on_fail=True)
    check_balance_identity(state, owner_ref, raise_on_fail=True)


def book_security_to_equity(
    state: SystemState,
    bank_id: str,
    security_id: str,
    tranche_label: str,
    params: RegulatoryParams,
) -> None:
    """Move a retained tranche into equity capital.

    The tranche is booked at the configured valuation weight of its face.
    Booking an unplaced security places it first, funded wholly from
    equity cash (the bank buys its own issue out of equity).
    """
    security = _get_security(state, security_id)
    tranche = security.tranche(tranche_label)
    if tranche.owner != (OWNER_BANK, bank_id):
        raise InvalidOperation(
            f"tranche {security_id}:{tranche_label} not owned by bank {bank_id!r}"
        )
    bank = state.bank(bank_id)
    if not security.placed:
        _place_security(state, security, 0)
    tranche.owner = (OWNER_EQUITY, bank_id)
    _rebook(bank, security, tranche, params)
    check_balance_identity(state, bank_id, raise_on_fail=True)


def pay_bonus(
    state: SystemState, bank_id: str, amount: Money, to_account: str
) -> None:
    """Pay equity cash out to a deposit account.

    The withdrawn equity cash backs the new deposit, so the money supply
    rises by the amount while total system cash is unchanged.
    """
    if amount == 0:
        return
    if amount < 0:
        raise InvalidOperation("bonus must be non-negative")
    bank = state.bank(bank_id)
    if bank.equity_cash < amount:
        raise InsufficientEquityCash(
            f"bank {bank_id!r} equity cash {bank.equity_cash}, bonus {amount}"
        )
    recipient = state.account(to_account)
    bank.equity_cash -= amount
    recipient.balance += amount
    state.bank(recipient.bank).cash += amount
    check_balance_identity(state, recipient.bank, raise_on_fail=True)
    check_balance_identity(state, bank_id, raise_on_fail=True)
