import pytest

from chainmarket import errors
from chainmarket.escrow import EscrowState


@pytest.fixture
def book(market):
    market.credit("eth-main", "B", 0)
    acct = market.escrow.open_escrow("eth-main", "B", "S", "C", 100)
    return market, acct


def test_open_starts_awaiting_payment(book):
    _, acct = book
    assert acct.state is EscrowState.AWAITING_PAYMENT and acct.held == 0


@pytest.mark.parametrize("buyer,seller,amount,err", [
    ("B", "B", 10, errors.IdenticalParties),
    ("B", "S", 0, errors.ZeroAmount),
])
def test_open_guards(market, buyer, seller, amount, err):
    with pytest.raises(err):
        market.escrow.open_escrow("eth-main", buyer, seller, "C", amount)


def test_exact_payment(book):
    w, acct = book
    w.escrow.confirm_payment(acct.id, "B", 100)
    assert acct.state is EscrowState.AWAITING_DELIVERY
    assert w.balance("eth-main", "@escrow") == 100
    assert w.balance("eth-main", "B") == 4900


@pytest.mark.parametrize("caller,value,err", [
    ("B", 101, errors.WrongValue),
    ("B", 99, errors.WrongValue),
    ("S", 100, errors.NotBuyer),
])
def test_payment_guards(book, caller, value, err):
    w, acct = book
    before = w.snapshot()
    with pytest.raises(err):
        w.escrow.confirm_payment(acct.id, caller, value)
    assert w.snapshot() == before


def test_payment_without_funds(market):
    market.market.register_participant("P", {"Buyer"}, True)
    acct = market.escrow.open_escrow("eth-main", "P", "S", "C", 10)
    with pytest.raises(errors.InsufficientBalance):
        market.escrow.confirm_payment(acct.id, "P", 10)


def test_buyer_confirms_delivery(book):
    w, acct = book
    w.escrow.confirm_payment(acct.id, "B", 100)
    w.escrow.confirm_delivery(acct.id, "B")
    assert acct.state is EscrowState.COMPLETE
    assert w.balance("eth-main", "S") == 100 and acct.held == 0


def test_seller_confirmation_refunds(book):
    w, acct = book
    w.escrow.confirm_payment(acct.id, "B", 100)
    w.escrow.confirm_delivery(acct.id, "S")
    assert acct.state is EscrowState.REFUNDED
    assert w.balance("eth-main", "B") == 5000 and acct.held == 0


def test_arbitrator_cannot_confirm(book):
    w, acct = book
    w.escrow.confirm_payment(acct.id, "B", 100)
    with pytest.raises(errors.NotParty):
        w.escrow.confirm_delivery(acct.id, "C")


def test_refund_paths(book):
    w, acct = book
    with pytest.raises(errors.WrongState):
        w.escrow.refund(acct.id, "C")
    w.escrow.confirm_payment(acct.id, "B", 100)
    with pytest.raises(errors.NotArbitrator):
        w.escrow.refund(acct.id, "B")
    w.escrow.refund(acct.id, "C")
    assert acct.state is EscrowState.REFUNDED
    assert w.balance("eth-main", "B") == 5000


def test_terminal_states(book):
    w, acct = book
    w.escrow.confirm_payment(acct.id, "B", 100)
    w.escrow.confirm_delivery(acct.id, "B")
    for call in (lambda: w.escrow.refund(acct.id, "C"),
                 lambda: w.escrow.confirm_delivery(acct.id, "B"),
                 lambda: w.escrow.confirm_payment(acct.id, "B", 100)):
        with pytest.raises(errors.WrongState):
            call()


def test_unknown_escrow(market):
    with pytest.raises(errors.UnknownEscrow):
        market.escrow.refund(9, "C")
