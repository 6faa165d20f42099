"""Global consistency checks evaluated after every scenario step."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .bridge import TransferKind
from .escrow import EscrowState
from .ledger import AUCTION_CUSTODY, ESCROW_CUSTODY
from .marketplace import AuctionStatus, OrderStatus
from .token import TokenStatus

if TYPE_CHECKING:
    from .world import WorldState


@dataclass(frozen=True)
class Violation:
    invariant: str
    detail: str

    def to_dict(self) -> dict:
        return {"invariant": self.invariant, "detail": self.detail}


def check_invariants(world: "WorldState") -> list[Violation]:
    out: list[Violation] = []
    for check in CHECKS:
        out.extend(check(world))
    return out


def native_conservation(world):
    for name, led in sorted(world.chains.items()):
        if any(v < 0 for v in led.balances.values()):
            yield Violation("conservation", f"negative native balance on {name}")
        if led.supply != led.minted:
            yield Violation("conservation", f"{name}: balances sum {led.supply} != credited {led.minted}")


def fungible_sanity(world):
    for name, fl in sorted(world.tokens.fungible.items()):
        if any(v < 0 for v in fl.balances.values()):
            yield Violation("fungible", f"negative fungible balance on {name}")


def escrow_fund_safety(world):
    held_by_chain: dict[str, int] = defaultdict(int)
    for acct in world.escrow.accounts.values():
        expect_held = acct.amount if acct.state is EscrowState.AWAITING_DELIVERY else 0
        if acct.held != expect_held:
            yield Violation("escrow", f"escrow {acct.id} holds {acct.held} in {acct.state.value}")
        if acct.paid_in != acct.paid_to_seller + acct.refunded + acct.held:
            yield Violation("escrow", f"escrow {acct.id} leaks funds")
        if acct.paid_to_seller and acct.refunded:
            yield Violation("escrow", f"escrow {acct.id} paid out twice")
        held_by_chain[acct.chain] += acct.held
    for name, led in sorted(world.chains.items()):
        if led.balance(ESCROW_CUSTODY) != held_by_chain[name]:
            yield Violation("escrow", f"{name}: escrow custody {led.balance(ESCROW_CUSTODY)} != held {held_by_chain[name]}")


def auction_custody(world):
    held_by_chain: dict[str, int] = defaultdict(int)
    for a in world.market.auctions.values():
        amounts = [amt for _, amt in a.bids]
        if any(x >= y for x, y in zip(amounts, amounts[1:])):
            yield Violation("auction", f"auction {a.id} bids not strictly increasing")
        if a.status is AuctionStatus.SETTLED:
            if a.escrowed:
                yield Violation("auction", f"auction {a.id} settled with escrow left")
            continue
        latest: dict[str, int] = {}
        for bidder, amt in a.bids:
            latest[bidder] = amt
        if latest != a.escrowed:
            yield Violation("auction", f"auction {a.id} escrow does not match highest bids")
        held_by_chain[a.chain] += sum(a.escrowed.values())
    for name, led in sorted(world.chains.items()):
        if led.balance(AUCTION_CUSTODY) != held_by_chain[name]:
            yield Violation("auction", f"{name}: auction custody {led.balance(AUCTION_CUSTODY)} != escrowed {held_by_chain[name]}")


def peg_conservation(world):
    hub = world.bridge
    main = world.main_chain
    in_flight: dict[str, int] = defaultdict(int)
    for t in hub.pending():
        if t.kind is TransferKind.PEG_LOCK:
            in_flight[t.to_chain] += t.amount
        elif t.kind is TransferKind.PEG_BURN:
            in_flight[t.from_chain] += t.amount
    for side, peg in sorted(hub.pegs.items()):
        supply = world.tokens.fungible[side].supply
        if peg.main_chain_locked - in_flight[side] != supply:
            yield Violation(
                "peg",
                f"{side}: locked {peg.main_chain_locked} - in-flight {in_flight[side]} != supply {supply}",
            )
        custody = hub.config(main, side).address(main)
        if world.ledger(main).balance(custody) != peg.main_chain_locked:
            yield Violation("peg", f"{side}: main-chain custody does not match locked amount")
    for side, fl in sorted(world.tokens.fungible.items()):
        if side not in hub.pegs and fl.supply:
            yield Violation("peg", f"{side}: fungible supply without a peg")


def single_liveness(world):
    tokens = world.tokens
    reps: dict[tuple, int] = defaultdict(int)
    for rec in tokens.records():
        if rec.origin is None:
            continue
        if rec.origin[0] not in tokens.contracts or rec.origin[1] not in tokens.contracts[rec.origin[0]].tokens:
            yield Violation("liveness", f"{rec.contract}#{rec.token_id} wraps a missing token")
            continue
        origin = tokens.record(*rec.origin)
        if (rec.uri, rec.metadata_hash) != (origin.uri, origin.metadata_hash):
            yield Violation("metadata", f"{rec.contract}#{rec.token_id} metadata differs from its origin")
        if not tokens.contracts[rec.contract].bridge_owned:
            yield Violation("liveness", f"{rec.contract}#{rec.token_id} has an origin outside a bridge contract")
        if rec.live:
            reps[rec.origin] += 1
    for t in world.bridge.pending():
        if t.kind in (TransferKind.NFT_LOCK, TransferKind.NFT_RETURN):
            reps[t.token] += 1

    for rec in tokens.records():
        if rec.origin is not None:
            continue
        if tokens.contracts[rec.contract].bridge_owned:
            yield Violation("liveness", f"{rec.contract}#{rec.token_id} in a bridge contract lacks an origin")
        elsewhere = reps.get(rec.key, 0)
        if rec.status is TokenStatus.LIVE and elsewhere:
            yield Violation("liveness", f"{rec.contract}#{rec.token_id} is live with {elsewhere} other representation(s)")
        elif rec.status is TokenStatus.BRIDGE_LOCKED:
            if elsewhere != 1:
                yield Violation("liveness", f"{rec.contract}#{rec.token_id} is locked with {elsewhere} representation(s)")
            if rec.owner not in world.bridge.bridge_addresses(rec.contract.chain).values():
                yield Violation("liveness", f"{rec.contract}#{rec.token_id} is locked outside bridge custody")
        elif rec.status is TokenStatus.BURNED:
            yield Violation("liveness", f"origin {rec.contract}#{rec.token_id} was burned")


def token_counters(world):
    for cid, c in sorted(world.tokens.contracts.items()):
        if sorted(c.tokens) != list(range(1, c.counter + 1)):
            yield Violation("counter", f"{cid}: token ids are not 1..{c.counter}")


def market_exclusivity(world):
    m = world.market
    engaged: dict[tuple, int] = defaultdict(int)
    for l in m.listings.values():
        if l.sold and l.active:
            yield Violation("listing", f"listing {l.id} is sold but active")
        if l.active:
            engaged[(l.contract, l.token_id)] += 1
    for o in m.orders.values():
        if o.status is OrderStatus.OPEN:
            engaged[(o.contract, o.token_id)] += 1
    for a in m.auctions.values():
        if a.status is not AuctionStatus.SETTLED:
            engaged[(a.contract, a.token_id)] += 1
    for key, n in sorted(engaged.items()):
        if n > 1:
            yield Violation("exclusivity", f"{key[0]}#{key[1]} has {n} open market engagements")
    if m.listing_count != len(m.listings):
        yield Violation("listing", f"listing_count {m.listing_count} != {len(m.listings)} listings")
    for s in m.sales.values():
        if s.commission != s.price * m.commission_bps // 10_000:
            yield Violation("commission", f"sale {s.id} commission {s.commission} is not floor(2.5%)")


CHECKS = (
    native_conservation,
    fungible_sanity,
    escrow_fund_safety,
    auction_custody,
    peg_conservation,
    single_liveness,
    token_counters,
    market_exclusivity,
)
