"""The marketplace contract.

Fixed-price sales come in two flavours that share one settlement path:
listings (``list_nft`` / ``buy_nft``) and selling orders (``sell_nft`` /
``buy_order``).  Auctions escrow each bid in full in the chain's
``@auction`` account; losers are refunded at settlement.

Every sale pays ``price * 250 // 10000`` to the marketplace owner and the rest
to the seller.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Optional

from . import errors
from .ledger import AUCTION_CUSTODY, MARKET_OPERATOR, check_amount, check_user_address
from .token import ContractId, NftRecord, TokenKey

if TYPE_CHECKING:
    from .world import WorldState

COMMISSION_BPS = 250
BPS_DENOMINATOR = 10_000
ROLES = frozenset({"Artist", "Seller", "Buyer"})


def commission_for(price: int) -> int:
    return price * COMMISSION_BPS // BPS_DENOMINATOR


@dataclass
class Rating:
    rater: str
    score: int
    sale_id: int


@dataclass
class Participant:
    address: str
    roles: frozenset[str]
    kyc_verified: bool
    ratings_received: list[Rating] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "address": self.address,
            "roles": sorted(self.roles),
            "kyc_verified": self.kyc_verified,
            "ratings": [{"rater": r.rater, "score": r.score, "sale_id": r.sale_id} for r in self.ratings_received],
        }


@dataclass
class Listing:
    id: int
    seller: str
    contract: ContractId
    token_id: int
    price: int
    chain: str
    active: bool = True
    sold: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "seller": self.seller,
            "contract": str(self.contract),
            "token_id": self.token_id,
            "price": self.price,
            "chain": self.chain,
            "active": self.active,
            "sold": self.sold,
        }


class OrderStatus(str, enum.Enum):
    OPEN = "Open"
    FILLED = "Filled"
    CANCELLED = "Cancelled"


@dataclass
class SellingOrder:
    id: int
    seller: str
    contract: ContractId
    token_id: int
    price: int
    status: OrderStatus = OrderStatus.OPEN

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "seller": self.seller,
            "contract": str(self.contract),
            "token_id": self.token_id,
            "price": self.price,
            "status": self.status.value,
        }


class AuctionStatus(str, enum.Enum):
    OPEN = "Open"
    ENDED = "Ended"
    SETTLED = "Settled"


@dataclass
class Auction:
    id: int
    seller: str
    contract: ContractId
    token_id: int
    start_price: int
    deadline_tick: int
    bids: list[tuple[str, int]] = field(default_factory=list)
    escrowed: dict[str, int] = field(default_factory=dict)
    status: AuctionStatus = AuctionStatus.OPEN
    winner: Optional[str] = None

    @property
    def chain(self) -> str:
        return self.contract.chain

    @property
    def highest(self) -> Optional[tuple[str, int]]:
        return self.bids[-1] if self.bids else None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "seller": self.seller,
            "contract": str(self.contract),
            "token_id": self.token_id,
            "start_price": self.start_price,
            "deadline_tick": self.deadline_tick,
            "bids": [[b, a] for b, a in self.bids],
            "escrowed": dict(sorted(self.escrowed.items())),
            "status": self.status.value,
            "winner": self.winner,
        }


@dataclass
class Sale:
    id: int
    kind: str
    ref_id: int
    buyer: str
    seller: str
    contract: ContractId
    token_id: int
    price: int
    commission: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "ref_id": self.ref_id,
            "buyer": self.buyer,
            "seller": self.seller,
            "contract": str(self.contract),
            "token_id": self.token_id,
            "price": self.price,
            "commission": self.commission,
        }


class Marketplace:
    commission_bps = COMMISSION_BPS

    def __init__(self, world: "WorldState", owner: str) -> None:
        self.world = world
        self.owner = check_user_address(owner)
        self.participants: dict[str, Participant] = {}
        self.preserved: set[ContractId] = set()
        self.listing_count = 0
        self.listings: dict[int, Listing] = {}
        self.orders: dict[int, SellingOrder] = {}
        self.auctions: dict[int, Auction] = {}
        self.sales: dict[int, Sale] = {}
        self._rated: set[tuple[str, int]] = set()
        # every listing/order/auction ever opened on a token, for fast exclusivity checks
        self._by_token: dict[TokenKey, list[tuple[str, int]]] = {}
        self._open_auctions: dict[int, Auction] = {}

    # -- registration ------------------------------------------------------

    def register_participant(self, address: str, roles: Iterable[str], kyc_proof: bool) -> Participant:
        self.world.check_user(address)
        roles = frozenset(roles)
        if not roles <= ROLES:
            raise errors.InvalidRole(f"unknown roles {sorted(roles - ROLES)}")
        if address in self.participants:
            raise errors.DuplicateRegistration(address)
        p = Participant(address, roles, bool(kyc_proof))
        self.participants[address] = p
        self.world.emit("ParticipantRegistered", address=address, roles=sorted(roles), kyc_verified=p.kyc_verified)
        return p

    def _require_verified(self, address: str, role: Optional[str] = None) -> Participant:
        p = self.participants.get(address)
        if p is None or not p.kyc_verified:
            raise errors.NotRegistered(f"{address} is not a verified participant")
        if role is not None and role not in p.roles:
            raise errors.NotRegistered(f"{address} lacks the {role} role")
        return p

    def register_seller_contract(self, seller: str, contract) -> None:
        self._require_verified(seller, "Seller")
        c = self.world.tokens.contract(contract)
        if c.bridge_owned:
            raise errors.NotAuthorizedMinter(f"{c.id} is bridge-owned")
        if c.id in self.preserved:
            raise errors.DuplicateContract(f"{c.id} is already preserved")
        self.preserved.add(c.id)
        self.world.tokens.set_minter(c.id, seller)
        self.world.emit("SellerContractRegistered", seller=seller, contract=str(c.id))

    # -- exclusivity -------------------------------------------------------

    def engagements(self, key: TokenKey) -> list[tuple[str, int, str]]:
        """Open market engagements on a token as (kind, id, seller)."""
        out = []
        for kind, ident in self._by_token.get(key, ()):
            if kind == "listing":
                l = self.listings[ident]
                if l.active:
                    out.append((kind, ident, l.seller))
            elif kind == "order":
                o = self.orders[ident]
                if o.status is OrderStatus.OPEN:
                    out.append((kind, ident, o.seller))
            else:
                a = self.auctions[ident]
                if a.status is not AuctionStatus.SETTLED:
                    out.append((kind, ident, a.seller))
        return out

    def _index(self, kind: str, ident: int, key: TokenKey) -> None:
        self._by_token.setdefault(key, []).append((kind, ident))

    def _claim(self, rec: NftRecord) -> list[tuple[str, int]]:
        """Raise AlreadyListed if the token is engaged by its current owner.

        Returns stale listings/orders (left behind by a previous owner) that the
        caller must retire once its own checks pass.
        """
        stale = []
        for kind, ident, seller in self.engagements(rec.key):
            if kind == "auction" or seller == rec.owner:
                raise errors.AlreadyListed(f"{rec.contract}#{rec.token_id} is already on the market")
            stale.append((kind, ident))
        return stale

    def _retire(self, stale: list[tuple[str, int]]) -> None:
        for kind, ident in stale:
            if kind == "listing":
                self.listings[ident].active = False
                self.world.emit("NFTUnlisted", listing_id=ident, reason="superseded")
            else:
                self.orders[ident].status = OrderStatus.CANCELLED
                self.world.emit("OrderCancelled", order_id=ident, reason="superseded")

    def _owned_live(self, caller: str, contract, token_id: int) -> NftRecord:
        rec = self.world.tokens.live_record(contract, token_id)
        if caller != rec.owner:
            raise errors.NotOwner(f"{caller} does not own {rec.contract}#{token_id}")
        return rec

    # -- listings ----------------------------------------------------------

    def list_nft(self, caller: str, contract, token_id: int, price: int, chain: str) -> Listing:
        self._require_verified(caller)
        rec = self._owned_live(caller, contract, token_id)
        if check_amount(price) == 0:
            raise errors.ZeroPrice("listing price must be positive")
        self.world.ledger(chain)
        if rec.contract.chain != chain:
            raise errors.WrongChain(f"{rec.contract} lives on {rec.contract.chain}, not {chain}")
        if rec.contract not in self.preserved:
            raise errors.ContractNotPreserved(str(rec.contract))
        stale = self._claim(rec)

        self._retire(stale)
        self.listing_count += 1
        listing = Listing(self.listing_count, caller, rec.contract, rec.token_id, price, chain)
        self.listings[listing.id] = listing
        self._index("listing", listing.id, rec.key)
        self.world.tokens._approve(rec, MARKET_OPERATOR)
        self.world.emit(
            "NFTListed",
            listing_id=listing.id,
            seller=caller,
            contract=str(rec.contract),
            token_id=rec.token_id,
            price=price,
            chain=chain,
        )
        return listing

    def listing(self, listing_id: int) -> Listing:
        try:
            return self.listings[listing_id]
        except (KeyError, TypeError):
            raise errors.UnknownListing(str(listing_id)) from None

    def unlist_nft(self, caller: str, listing_id: int) -> None:
        listing = self.listing(listing_id)
        if caller != listing.seller:
            raise errors.NotListingOwner(f"{caller} did not create listing {listing_id}")
        if not listing.active:
            raise errors.ListingInactive(f"listing {listing_id} is inactive")
        listing.active = False
        self._revoke(listing.contract, listing.token_id, listing.seller)
        self.world.emit("NFTUnlisted", listing_id=listing_id, reason="seller")

    def _revoke(self, contract: ContractId, token_id: int, seller: str) -> None:
        rec = self.world.tokens.record(contract, token_id)
        if rec.live and rec.owner == seller and rec.approved == MARKET_OPERATOR:
            self.world.tokens._approve(rec, None)

    # -- selling orders ----------------------------------------------------

    def sell_nft(self, caller: str, contract, token_id: int, price: int) -> SellingOrder:
        self._require_verified(caller)
        rec = self._owned_live(caller, contract, token_id)
        if check_amount(price) == 0:
            raise errors.ZeroPrice("selling price must be positive")
        stale = self._claim(rec)

        self._retire(stale)
        self.world.tokens._approve(rec, MARKET_OPERATOR)
        order = SellingOrder(len(self.orders) + 1, caller, rec.contract, rec.token_id, price)
        self.orders[order.id] = order
        self._index("order", order.id, rec.key)
        self.world.emit(
            "NFTListedForSale",
            order_id=order.id,
            seller=caller,
            contract=str(rec.contract),
            token_id=rec.token_id,
            price=price,
        )
        return order

    def order(self, order_id: int) -> SellingOrder:
        try:
            return self.orders[order_id]
        except (KeyError, TypeError):
            raise errors.UnknownOrder(str(order_id)) from None

    def cancel_order(self, caller: str, order_id: int) -> None:
        order = self.order(order_id)
        if caller != order.seller:
            raise errors.NotListingOwner(f"{caller} did not create order {order_id}")
        if order.status is not OrderStatus.OPEN:
            raise errors.OrderNotOpen(f"order {order_id} is {order.status.value}")
        order.status = OrderStatus.CANCELLED
        self._revoke(order.contract, order.token_id, order.seller)
        self.world.emit("OrderCancelled", order_id=order_id, reason="seller")

    # -- fixed-price settlement -------------------------------------------

    def _holding(self, seller: str, contract: ContractId, token_id: int) -> Optional[NftRecord]:
        """The token record if ``seller`` still holds it live with marketplace approval."""
        rec = self.world.tokens.record(contract, token_id)
        if rec.live and rec.owner == seller and rec.approved == MARKET_OPERATOR:
            return rec
        return None

    def _check_deliverable(self, seller: str, contract: ContractId, token_id: int) -> NftRecord:
        if contract not in self.preserved:
            raise errors.ContractNotPreserved(str(contract))
        rec = self.world.tokens.record(contract, token_id)
        if not rec.live or rec.owner != seller:
            raise errors.OwnershipChanged(f"{contract}#{token_id} no longer held by {seller}")
        if rec.approved != MARKET_OPERATOR:
            raise errors.NotAuthorized(f"marketplace approval for {contract}#{token_id} was revoked")
        return rec

    def _payout(self, payer: str, seller: str, price: int, chain: str) -> int:
        """Move ``price`` from payer: commission to owner, the rest to seller."""
        ledger = self.world.ledger(chain)
        fee = commission_for(price)
        ledger.require(payer, price)
        incoming: dict[str, int] = {}
        for to, amt in ((seller, price - fee), (self.owner, fee)):
            if to != payer:
                incoming[to] = incoming.get(to, 0) + amt
        for to, amt in incoming.items():
            ledger.check_receive(to, amt)
        ledger.transfer(payer, seller, price - fee)
        ledger.transfer(payer, self.owner, fee)
        return fee

    def _record_sale(self, kind: str, ref_id: int, buyer: str, seller: str, rec: NftRecord,
                     price: int, fee: int) -> Sale:
        sale = Sale(len(self.sales) + 1, kind, ref_id, buyer, seller, rec.contract, rec.token_id, price, fee)
        self.sales[sale.id] = sale
        return sale

    def buy_nft(self, caller: str, listing_id: int, payment: int) -> Sale:
        self._require_verified(caller)
        listing = self.listing(listing_id)
        check_amount(payment)
        if payment != listing.price:
            raise errors.WrongValue(f"payment {payment} must equal price {listing.price}")
        if not listing.active:
            raise errors.ListingInactive(f"listing {listing_id} is inactive")
        rec = self._check_deliverable(listing.seller, listing.contract, listing.token_id)
        self.world.ledger(listing.chain).require(caller, payment)

        self.world.tokens._move(rec, caller)
        listing.active = False
        listing.sold = True
        fee = self._payout(caller, listing.seller, payment, listing.chain)
        sale = self._record_sale("listing", listing_id, caller, listing.seller, rec, payment, fee)
        self.world.emit(
            "NFTBought",
            listing_id=listing_id,
            sale_id=sale.id,
            buyer=caller,
            seller=listing.seller,
            contract=str(rec.contract),
            token_id=rec.token_id,
            price=payment,
            commission=fee,
        )
        return sale

    def buy_order(self, caller: str, order_id: int, payment: int) -> Sale:
        self._require_verified(caller)
        order = self.order(order_id)
        check_amount(payment)
        if payment != order.price:
            raise errors.WrongValue(f"payment {payment} must equal price {order.price}")
        if order.status is not OrderStatus.OPEN:
            raise errors.OrderNotOpen(f"order {order_id} is {order.status.value}")
        rec = self._check_deliverable(order.seller, order.contract, order.token_id)
        chain = order.contract.chain
        self.world.ledger(chain).require(caller, payment)

        self.world.tokens._move(rec, caller)
        order.status = OrderStatus.FILLED
        fee = self._payout(caller, order.seller, payment, chain)
        sale = self._record_sale("order", order_id, caller, order.seller, rec, payment, fee)
        self.world.emit(
            "NFTBought",
            order_id=order_id,
            sale_id=sale.id,
            buyer=caller,
            seller=order.seller,
            contract=str(rec.contract),
            token_id=rec.token_id,
            price=payment,
            commission=fee,
        )
        return sale

    # -- auctions ----------------------------------------------------------

    def start_auction(self, caller: str, contract, token_id: int, start_price: Optional[int],
                      duration_ticks: int) -> Auction:
        self._require_verified(caller)
        rec = self._owned_live(caller, contract, token_id)
        check_amount(duration_ticks)
        if duration_ticks == 0:
            raise errors.ZeroDuration("auction duration must be positive")
        price = rec.mint_price if start_price is None else check_amount(start_price)
        stale = self._claim(rec)

        self._retire(stale)
        self.world.tokens._approve(rec, MARKET_OPERATOR)
        auction = Auction(
            len(self.auctions) + 1,
            caller,
            rec.contract,
            rec.token_id,
            price,
            self.world.clock.tick + duration_ticks,
        )
        self.auctions[auction.id] = auction
        self._index("auction", auction.id, rec.key)
        self._open_auctions[auction.id] = auction
        self.world.emit(
            "AuctionStarted",
            auction_id=auction.id,
            seller=caller,
            contract=str(rec.contract),
            token_id=rec.token_id,
            start_price=price,
            deadline_tick=auction.deadline_tick,
        )
        return auction

    def auction(self, auction_id: int) -> Auction:
        try:
            return self.auctions[auction_id]
        except (KeyError, TypeError):
            raise errors.UnknownAuction(str(auction_id)) from None

    def place_bid(self, caller: str, auction_id: int, amount: int) -> None:
        auction = self.auction(auction_id)
        self._require_verified(caller)
        if auction.status is not AuctionStatus.OPEN or self.world.clock.tick >= auction.deadline_tick:
            raise errors.AuctionClosed(f"auction {auction_id} is closed")
        if caller == auction.seller:
            raise errors.SelfBid("sellers may not bid on their own auction")
        check_amount(amount)
        top = auction.highest
        if amount == 0 or amount < auction.start_price or (top is not None and amount <= top[1]):
            raise errors.BidTooLow(f"bid {amount} does not beat the current price")
        ledger = self.world.ledger(auction.chain)
        prev = auction.escrowed.get(caller, 0)
        ledger.require(caller, amount - prev)

        if prev:
            ledger.transfer(AUCTION_CUSTODY, caller, prev)
        ledger.transfer(caller, AUCTION_CUSTODY, amount)
        auction.escrowed[caller] = amount
        auction.bids.append((caller, amount))
        self.world.emit("BidPlaced", auction_id=auction_id, bidder=caller, amount=amount)

    def on_tick(self, now: int) -> list[Auction]:
        ended = [a for a in self._open_auctions.values() if a.deadline_tick <= now]
        for a in ended:
            del self._open_auctions[a.id]
            a.status = AuctionStatus.ENDED
            self.world.emit("AuctionEnded", auction_id=a.id)
        return ended

    def settle_auction(self, auction_id: int) -> Optional[Sale]:
        auction = self.auction(auction_id)
        if auction.status is AuctionStatus.SETTLED:
            raise errors.AlreadySettled(f"auction {auction_id} already settled")
        if auction.status is AuctionStatus.OPEN:
            raise errors.AuctionStillOpen(f"auction {auction_id} ends at tick {auction.deadline_tick}")
        ledger = self.world.ledger(auction.chain)
        top = auction.highest

        # a seller who no longer holds the token voids the sale; all bids are refunded
        rec = None if top is None else self._holding(auction.seller, auction.contract, auction.token_id)

        sale = None
        if rec is not None:
            winner, amount = top
            self.world.tokens._move(rec, winner)
            for bidder, held in sorted(auction.escrowed.items()):
                if bidder != winner:
                    ledger.transfer(AUCTION_CUSTODY, bidder, held)
            fee = self._payout(AUCTION_CUSTODY, auction.seller, amount, auction.chain)
            auction.winner = winner
            sale = self._record_sale("auction", auction_id, winner, auction.seller, rec, amount, fee)
        else:
            for bidder, held in sorted(auction.escrowed.items()):
                ledger.transfer(AUCTION_CUSTODY, bidder, held)
            self._revoke(auction.contract, auction.token_id, auction.seller)
        auction.escrowed = {}
        auction.status = AuctionStatus.SETTLED
        self.world.emit(
            "AuctionSettled",
            auction_id=auction_id,
            winner=auction.winner,
            amount=None if sale is None else sale.price,
            commission=None if sale is None else sale.commission,
            sale_id=None if sale is None else sale.id,
            voided=top is not None and sale is None,
        )
        return sale

    # -- ratings -----------------------------------------------------------

    def rate_counterparty(self, caller: str, sale_id: int, target: str, score: int) -> None:
        try:
            sale = self.sales[sale_id]
        except (KeyError, TypeError):
            raise errors.UnknownSale(str(sale_id)) from None
        parties = {sale.buyer, sale.seller}
        if caller == target or caller not in parties or target not in parties:
            raise errors.NotPartyToSale(f"{caller} -> {target} are not the parties of sale {sale_id}")
        if (caller, sale_id) in self._rated:
            raise errors.DuplicateRating(f"{caller} already rated sale {sale_id}")
        if isinstance(score, bool) or not isinstance(score, int) or not 1 <= score <= 5:
            raise errors.InvalidScore(f"score must be 1..5, got {score!r}")
        self._rated.add((caller, sale_id))
        rating = Rating(caller, score, sale_id)
        p = self.participants.get(target)
        if p is not None:
            p.ratings_received.append(rating)
        self.world.emit("Rated", sale_id=sale_id, rater=caller, target=target, score=score)
