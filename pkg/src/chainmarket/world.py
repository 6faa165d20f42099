"""The simulated world: chains, tokens, bridges, escrows and the marketplace."""

from __future__ import annotations

from typing import Any, Optional

from . import errors
from .bridge import BridgeHub
from .escrow import EscrowBook
from .events import EventLog
from .ledger import SYSTEM_PREFIX, ChainLedger, Clock, check_amount, check_chain_id, check_user_address
from .marketplace import Marketplace
from .metadata_store import MetadataStore
from .token import TokenRegistry

DEFAULT_MARKET_OWNER = "market-owner"


class WorldState:
    """Single-writer container for all simulation state.

    Operations either apply completely or raise a :class:`~chainmarket.errors.SimError`
    before touching anything.
    """

    def __init__(self, market_owner: str = DEFAULT_MARKET_OWNER, main_chain: Optional[str] = None) -> None:
        self.clock = Clock()
        self.events = EventLog()
        self.chains: dict[str, ChainLedger] = {}
        self.main_chain = main_chain
        self.store = MetadataStore()
        self.tokens = TokenRegistry(self)
        self.bridge = BridgeHub(self)
        self.escrow = EscrowBook(self)
        self.market = Marketplace(self, market_owner)

    def emit(self, name: str, **fields: Any):
        return self.events.emit(self.clock.tick, name, **fields)

    # -- chains ------------------------------------------------------------

    def create_chain(self, chain: str) -> ChainLedger:
        check_chain_id(chain)
        if chain in self.chains:
            raise errors.DuplicateChain(chain)
        ledger = ChainLedger(chain, self.emit)
        self.chains[chain] = ledger
        self.tokens.add_chain(chain)
        if self.main_chain is None:
            self.main_chain = chain
        self.emit("ChainCreated", chain=chain)
        return ledger

    def ledger(self, chain: str) -> ChainLedger:
        try:
            return self.chains[chain]
        except (KeyError, TypeError):
            raise errors.UnknownChain(str(chain)) from None

    # -- addresses ---------------------------------------------------------

    def is_reserved(self, addr: str) -> bool:
        """System custody accounts and configured bridge addresses."""
        return addr.startswith(SYSTEM_PREFIX) or any(addr in led.system_accounts for led in self.chains.values())

    def check_user(self, addr) -> str:
        check_user_address(addr)
        if self.is_reserved(addr):
            raise errors.ReservedAccount(f"{addr} is a system account")
        return addr

    def address_in_use(self, addr: str) -> bool:
        """True if ``addr`` holds or is owed anything anywhere in the world."""
        if addr == self.market.owner or addr in self.market.participants:
            return True
        if any(led.balance(addr) for led in self.chains.values()):
            return True
        if any(fl.balance(addr) for fl in self.tokens.fungible.values()):
            return True
        if any(addr in (a.buyer, a.seller, a.arbitrator) for a in self.escrow.accounts.values()):
            return True
        return any(addr in (r.owner, r.approved) for r in self.tokens.records())

    def credit(self, chain: str, to: str, amount: int) -> None:
        ledger = self.ledger(chain)
        self.check_user(to)
        ledger.credit(to, amount)

    def transfer_native(self, chain: str, frm: str, to: str, amount: int) -> None:
        ledger = self.ledger(chain)
        self.check_user(frm)
        self.check_user(to)
        ledger.transfer(frm, to, amount)

    def put_metadata(self, blob: bytes) -> str:
        h = self.store.put(blob)
        self.emit("MetadataStored", hash=h, size=len(blob))
        return h

    def balance(self, chain: str, addr: str) -> int:
        return self.ledger(chain).balance(addr)

    # -- time --------------------------------------------------------------

    def advance_time(self, ticks: int) -> list:
        """Move the clock, deliver due bridge messages, close expired auctions."""
        check_amount(ticks)
        if ticks == 0:
            return []
        self.clock.advance(ticks)
        delivered = self.bridge.deliver()
        self.market.on_tick(self.clock.tick)
        return delivered

    @property
    def quiescent(self) -> bool:
        return not self.bridge.pending()

    # -- reporting ---------------------------------------------------------

    def snapshot(self) -> dict:
        """Canonical, JSON-ready dump of every piece of mutable state."""
        m = self.market
        return {
            "clock": self.clock.tick,
            "main_chain": self.main_chain,
            "chains": {
                name: {
                    "native": led.to_dict(),
                    "minted": led.minted,
                    "fungible": {k: v for k, v in sorted(self.tokens.fungible[name].balances.items()) if v},
                }
                for name, led in sorted(self.chains.items())
            },
            "contracts": {
                str(cid): {"minter": c.minter, "counter": c.counter, "bridge_owned": c.bridge_owned}
                for cid, c in sorted(self.tokens.contracts.items())
            },
            "nfts": [r.to_dict() for r in self.tokens.records()],
            "metadata": self.store.hashes(),
            "bridges": [
                {"chains": list(key), "addresses": [cfg.address(key[0]), cfg.address(key[1])]}
                for key, cfg in sorted(self.bridge.configs.items())
            ],
            "transfers": [t.to_dict() for _, t in sorted(self.bridge.transfers.items())],
            "pegs": {k: p.main_chain_locked for k, p in sorted(self.bridge.pegs.items())},
            "relay": {
                "delays": {f"{a}>{b}": d for (a, b), d in sorted(self.bridge.delays.items())},
                "fail_ids": sorted(self.bridge.fail_ids),
            },
            "escrows": [a.to_dict() for _, a in sorted(self.escrow.accounts.items())],
            "market": {
                "owner": m.owner,
                "commission_bps": m.commission_bps,
                "participants": [p.to_dict() for _, p in sorted(m.participants.items())],
                "preserved": sorted(str(c) for c in m.preserved),
                "listing_count": m.listing_count,
                "listings": [l.to_dict() for _, l in sorted(m.listings.items())],
                "orders": [o.to_dict() for _, o in sorted(m.orders.items())],
                "auctions": [a.to_dict() for _, a in sorted(m.auctions.items())],
                "sales": [s.to_dict() for _, s in sorted(m.sales.items())],
            },
            "event_count": len(self.events),
        }
