import pytest

from chainmarket import WorldState, check_invariants, errors
from chainmarket.bridge import TransferKind, TransferStatus
from chainmarket.token import TokenStatus

from .conftest import ART, make_market, mint

WRAPPED = "bsc/@wrapped"


def test_set_bridges_stores_both():
    w = WorldState()
    w.create_chain("eth-main")
    w.create_chain("bsc")
    cfg = w.bridge.set_bridges("eth-main", "eb", "bsc", "bb")
    assert (cfg.address("eth-main"), cfg.address("bsc")) == ("eb", "bb")
    assert w.bridge.config("bsc", "eth-main") is cfg


def test_set_bridges_only_once(market):
    with pytest.raises(errors.AlreadySet):
        market.bridge.set_bridges("bsc", "x", "eth-main", "y")


@pytest.mark.parametrize("a,b", [("", "bb"), ("eb", ""), ("@escrow", "bb"), ("same", "same"), ("B", "bb"), ("eth-bridge", "pb")])
def test_set_bridges_bad_addresses(a, b):
    w = make_market(extra_chains=("polygon",))
    before = w.snapshot()
    with pytest.raises(errors.InvalidAddress):
        w.bridge.set_bridges("eth-main", a, "polygon", b)
    assert w.snapshot() == before


def test_set_bridges_same_chain(market):
    with pytest.raises(errors.SameChain):
        market.bridge.set_bridges("bsc", "x", "bsc", "y")


def test_lock_moves_token_into_custody(minted):
    w, tid = minted
    t = w.bridge.lock_nft("S", ART, tid, "bsc")
    rec = w.tokens.record(ART, tid)
    assert rec.status is TokenStatus.BRIDGE_LOCKED and rec.owner == "eth-bridge"
    ev = w.events.named("NFTLocked")[-1].fields
    assert ev == {"tokenId": tid, "fromChain": "eth-main", "toChain": "bsc", "nftContract": "art"}
    assert (t.kind, t.status, t.delivery_tick) == (TransferKind.NFT_LOCK, TransferStatus.IN_FLIGHT, 1)


def test_lock_guards(minted):
    w, tid = minted
    before = w.snapshot()
    with pytest.raises(errors.NotOwner):
        w.bridge.lock_nft("B", ART, tid, "bsc")
    with pytest.raises(errors.SameChain):
        w.bridge.lock_nft("S", ART, tid, "eth-main")
    assert w.snapshot() == before
    w.bridge.lock_nft("S", ART, tid, "bsc")
    with pytest.raises(errors.TokenNotLive):
        w.bridge.lock_nft("S", ART, tid, "bsc")


def test_lock_without_bridge():
    w = make_market(extra_chains=("polygon",))
    tid = mint(w)
    with pytest.raises(errors.BridgesNotSet):
        w.bridge.lock_nft("S", ART, tid, "polygon")


def test_delivery_mints_wrapped_copy(minted):
    w, tid = minted
    w.bridge.lock_nft("S", ART, tid, "bsc")
    with pytest.raises(errors.UnknownToken):
        w.tokens.record(WRAPPED, 1)
    w.advance_time(1)
    orig, wrapped = w.tokens.record(ART, tid), w.tokens.record(WRAPPED, 1)
    assert wrapped.owner == "S" and wrapped.live
    assert wrapped.origin == (orig.contract, tid)
    assert (wrapped.uri, wrapped.metadata_hash, wrapped.mint_price) == (orig.uri, orig.metadata_hash, orig.mint_price)


def test_redelivery_is_a_noop(minted):
    w, tid = minted
    t = w.bridge.lock_nft("S", ART, tid, "bsc")
    w.advance_time(1)
    before = w.snapshot()
    assert w.bridge.deliver_one(t.id) is False
    assert w.snapshot() == before


def test_injected_failure_keeps_custody(minted):
    w, tid = minted
    w.bridge.inject_fault([1])
    t = w.bridge.lock_nft("S", ART, tid, "bsc")
    w.advance_time(5)
    assert t.status is TransferStatus.FAILED
    assert w.tokens.record(ART, tid).status is TokenStatus.BRIDGE_LOCKED
    assert w.tokens.contract(WRAPPED).counter == 0
    assert check_invariants(w) == []
    w.bridge.retry_transfer(t.id)
    w.advance_time(1)
    assert t.status is TransferStatus.DELIVERED
    assert w.tokens.owner_of(WRAPPED, 1) == "S"
    with pytest.raises(errors.NotRetryable):
        w.bridge.retry_transfer(t.id)


def test_relay_delay_and_fifo(market):
    a, b = mint(market, "a"), mint(market, "b")
    market.bridge.set_delay("eth-main", "bsc", 4)
    t1 = market.bridge.lock_nft("S", ART, a, "bsc")
    market.bridge.set_delay("eth-main", "bsc", 1)
    t2 = market.bridge.lock_nft("S", ART, b, "bsc")
    assert t1.delivery_tick == 4 and t2.delivery_tick >= t1.delivery_tick
    market.advance_time(3)
    assert not t2.status is TransferStatus.DELIVERED
    market.advance_time(1)
    assert [t.id for t in market.bridge.transfers.values() if t.status is TransferStatus.DELIVERED] == [t1.id, t2.id]
    with pytest.raises(errors.InvalidDelay):
        market.bridge.set_delay("eth-main", "bsc", 0)


def test_burn_wrapped(minted):
    w, tid = minted
    w.bridge.lock_nft("S", ART, tid, "bsc")
    w.advance_time(1)
    with pytest.raises(errors.NotWrapped):
        w.bridge.burn_wrapped("S", ART, tid)
    with pytest.raises(errors.NotOwner):
        w.bridge.burn_wrapped("B", WRAPPED, 1)
    t = w.bridge.burn_wrapped("S", WRAPPED, 1)
    assert w.tokens.record(WRAPPED, 1).status is TokenStatus.BURNED
    assert (t.kind, t.status, t.beneficiary) == (TransferKind.NFT_RETURN, TransferStatus.IN_FLIGHT, "S")
    with pytest.raises(errors.TokenNotLive):
        w.tokens.transfer_nft(WRAPPED, "S", 1, "B")


def test_round_trip_returns_to_last_holder(minted):
    w, tid = minted
    h = w.tokens.record(ART, tid).metadata_hash
    w.bridge.lock_nft("S", ART, tid, "bsc")
    w.advance_time(1)
    w.tokens.transfer_nft(WRAPPED, "S", 1, "B")
    w.tokens.transfer_nft(WRAPPED, "B", 1, "C")
    w.bridge.burn_wrapped("C", WRAPPED, 1)
    w.advance_time(1)
    rec = w.tokens.record(ART, tid)
    assert (rec.status, rec.owner, rec.metadata_hash) == (TokenStatus.LIVE, "C", h)
    assert w.events.named("NFTUnlocked")[-1].fields["tokenId"] == tid
    live = [r for r in w.tokens.records() if r.live]
    assert len(live) == 1
    assert check_invariants(w) == []


def test_unlock_guards(minted):
    w, tid = minted
    with pytest.raises(errors.TokenNotLocked):
        w.bridge.unlock_nft("bsc-bridge", ART, tid, "S")
    w.bridge.lock_nft("S", ART, tid, "bsc")
    before = w.snapshot()
    for caller in ("B", "S", "eth-bridge"):
        with pytest.raises(errors.UnauthorizedBridge):
            w.bridge.unlock_nft(caller, ART, tid, "S")
    assert w.snapshot() == before


def test_peg_lock_and_burn():
    w = make_market(buyers=("B",), funds=100)
    w.bridge.peg_lock("B", 100, "bsc")
    assert w.balance("eth-main", "eth-bridge") == 100
    assert w.tokens.balance_of("bsc", "B") == 0
    w.advance_time(1)
    assert w.tokens.balance_of("bsc", "B") == 100
    w.bridge.peg_burn("B", 40, "bsc")
    assert w.tokens.fungible_ledger("bsc").supply == 60
    w.advance_time(1)
    assert w.balance("eth-main", "eth-bridge") == 60
    assert w.bridge.peg("bsc").main_chain_locked == 60
    assert w.balance("eth-main", "B") == 40
    w.bridge.peg_burn("B", 60, "bsc")
    w.advance_time(1)
    assert (w.balance("eth-main", "B"), w.tokens.fungible_ledger("bsc").supply) == (100, 0)


def test_peg_zero_and_guards():
    w = make_market(buyers=("B",), funds=100)
    before_supply = w.ledger("eth-main").supply
    w.bridge.peg_lock("B", 0, "bsc")
    w.advance_time(1)
    assert w.ledger("eth-main").supply == before_supply
    assert w.tokens.fungible_ledger("bsc").supply == 0
    with pytest.raises(errors.InsufficientBalance):
        w.bridge.peg_lock("B", 101, "bsc")
    with pytest.raises(errors.InsufficientBalance):
        w.bridge.peg_burn("B", 1, "bsc")
    with pytest.raises(errors.SameChain):
        w.bridge.peg_burn("B", 0, "eth-main")


def test_bridge_addresses_are_reserved(market):
    for call in (
        lambda: market.credit("eth-main", "eth-bridge", 1),
        lambda: market.transfer_native("eth-main", "B", "eth-bridge", 1),
        lambda: market.bridge.peg_lock("eth-bridge", 0, "bsc"),
        lambda: market.escrow.open_escrow("eth-main", "eth-bridge", "S", "C", 5),
        lambda: market.market.register_participant("bsc-bridge", {"Buyer"}, True),
    ):
        with pytest.raises(errors.ReservedAccount):
            call()
