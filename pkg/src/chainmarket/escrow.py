"""Arbitrated escrow accounts.

State machine::

    AWAITING_PAYMENT --confirm_payment--> AWAITING_DELIVERY
    AWAITING_DELIVERY --confirm_delivery(buyer)--> COMPLETE
    AWAITING_DELIVERY --confirm_delivery(seller) / refund(arbitrator)--> REFUNDED

Funds sit in the chain's ``@escrow`` custody account while AWAITING_DELIVERY.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import errors
from .ledger import ESCROW_CUSTODY, check_amount

if TYPE_CHECKING:
    from .world import WorldState


class EscrowState(str, enum.Enum):
    AWAITING_PAYMENT = "AWAITING_PAYMENT"
    AWAITING_DELIVERY = "AWAITING_DELIVERY"
    COMPLETE = "COMPLETE"
    REFUNDED = "REFUNDED"


LEGAL_TRANSITIONS = frozenset({
    (EscrowState.AWAITING_PAYMENT, EscrowState.AWAITING_DELIVERY),
    (EscrowState.AWAITING_DELIVERY, EscrowState.COMPLETE),
    (EscrowState.AWAITING_DELIVERY, EscrowState.REFUNDED),
})


@dataclass
class EscrowAccount:
    id: int
    chain: str
    buyer: str
    seller: str
    arbitrator: str
    amount: int
    state: EscrowState = EscrowState.AWAITING_PAYMENT
    held: int = 0
    # running totals for the fund-safety check
    paid_in: int = 0
    paid_to_seller: int = 0
    refunded: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "chain": self.chain,
            "buyer": self.buyer,
            "seller": self.seller,
            "arbitrator": self.arbitrator,
            "amount": self.amount,
            "state": self.state.value,
            "held": self.held,
        }


class EscrowBook:
    def __init__(self, world: "WorldState") -> None:
        self.world = world
        self.accounts: dict[int, EscrowAccount] = {}

    def get(self, escrow_id: int) -> EscrowAccount:
        try:
            return self.accounts[escrow_id]
        except (KeyError, TypeError):
            raise errors.UnknownEscrow(str(escrow_id)) from None

    def open_escrow(self, chain: str, buyer: str, seller: str, arbitrator: str, amount: int) -> EscrowAccount:
        self.world.ledger(chain)
        for addr in (buyer, seller, arbitrator):
            self.world.check_user(addr)
        if len({buyer, seller, arbitrator}) != 3:
            raise errors.IdenticalParties("buyer, seller and arbitrator must be distinct")
        if check_amount(amount) == 0:
            raise errors.ZeroAmount("escrow amount must be positive")
        acct = EscrowAccount(len(self.accounts) + 1, chain, buyer, seller, arbitrator, amount)
        self.accounts[acct.id] = acct
        self.world.emit(
            "EscrowOpened",
            escrow_id=acct.id,
            chain=chain,
            buyer=buyer,
            seller=seller,
            arbitrator=arbitrator,
            amount=amount,
        )
        return acct

    def _set_state(self, acct: EscrowAccount, new: EscrowState) -> None:
        old = acct.state
        acct.state = new
        self.world.emit("EscrowStateChanged", escrow_id=acct.id, old=old.value, new=new.value)

    def confirm_payment(self, escrow_id: int, caller: str, sent_value: int) -> None:
        acct = self.get(escrow_id)
        if caller != acct.buyer:
            raise errors.NotBuyer(f"{caller} is not the buyer of escrow {escrow_id}")
        if sent_value != acct.amount:
            raise errors.WrongValue(f"sent {sent_value}, escrow requires exactly {acct.amount}")
        if acct.state is not EscrowState.AWAITING_PAYMENT:
            raise errors.WrongState(f"escrow {escrow_id} is {acct.state.value}")
        ledger = self.world.ledger(acct.chain)
        ledger.require(caller, acct.amount)

        ledger.transfer(caller, ESCROW_CUSTODY, acct.amount)
        acct.held = acct.amount
        acct.paid_in += acct.amount
        self._set_state(acct, EscrowState.AWAITING_DELIVERY)

    def confirm_delivery(self, escrow_id: int, caller: str) -> None:
        acct = self.get(escrow_id)
        if caller not in (acct.buyer, acct.seller):
            raise errors.NotParty(f"{caller} is neither buyer nor seller of escrow {escrow_id}")
        if acct.state is not EscrowState.AWAITING_DELIVERY:
            raise errors.WrongState(f"escrow {escrow_id} is {acct.state.value}")
        if caller == acct.buyer:
            self._release(acct, acct.seller, EscrowState.COMPLETE)
        else:
            self._release(acct, acct.buyer, EscrowState.REFUNDED)

    def refund(self, escrow_id: int, caller: str) -> None:
        acct = self.get(escrow_id)
        if caller != acct.arbitrator:
            raise errors.NotArbitrator(f"{caller} is not the arbitrator of escrow {escrow_id}")
        if acct.state is not EscrowState.AWAITING_DELIVERY:
            raise errors.WrongState(f"escrow {escrow_id} is {acct.state.value}")
        self._release(acct, acct.buyer, EscrowState.REFUNDED)

    def _release(self, acct: EscrowAccount, to: str, new_state: EscrowState) -> None:
        ledger = self.world.ledger(acct.chain)
        ledger.check_receive(to, acct.held)
        ledger.transfer(ESCROW_CUSTODY, to, acct.held)
        if new_state is EscrowState.COMPLETE:
            acct.paid_to_seller += acct.held
        else:
            acct.refunded += acct.held
        acct.held = 0
        self._set_state(acct, new_state)
