"""Pairwise bridges between chains and the relay that services them.

Each unordered chain pair gets one :class:`BridgeConfig` holding the bridge
contract address on either side.  Those addresses double as custody
accounts: a locked NFT is owned by the home-side bridge address, and pegged
native currency sits in the main-chain bridge address' balance.

Cross-chain effects are queued as :class:`BridgeTransfer` messages and land
when :meth:`BridgeHub.deliver` runs (called from ``WorldState.advance_time``).
Delivery is exactly-once and FIFO per directed channel.  A transfer whose id
is in the fault set is marked ``Failed`` instead of delivered and waits for an
explicit :meth:`BridgeHub.retry_transfer`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Optional

from . import errors
from .ledger import check_amount
from .token import ContractId, NftRecord, TokenKey, TokenStatus

if TYPE_CHECKING:
    from .world import WorldState

DEFAULT_DELAY = 1

ChainPair = tuple[str, str]


def pair_key(a: str, b: str) -> ChainPair:
    return (a, b) if a <= b else (b, a)


class TransferKind(str, enum.Enum):
    NFT_LOCK = "NftLock"
    NFT_RETURN = "NftReturn"
    PEG_LOCK = "PegLock"
    PEG_BURN = "PegBurn"


class TransferStatus(str, enum.Enum):
    IN_FLIGHT = "InFlight"
    DELIVERED = "Delivered"
    FAILED = "Failed"


@dataclass
class BridgeConfig:
    chains: ChainPair
    addresses: dict[str, str] = field(default_factory=dict)
    set_once: bool = False

    def address(self, chain: str) -> str:
        return self.addresses[chain]

    def other(self, chain: str) -> str:
        a, b = self.chains
        return b if chain == a else a


@dataclass
class BridgeTransfer:
    id: int
    kind: TransferKind
    from_chain: str
    to_chain: str
    beneficiary: str
    submitted_tick: int
    delivery_tick: int
    token: Optional[TokenKey] = None
    amount: Optional[int] = None
    status: TransferStatus = TransferStatus.IN_FLIGHT
    result: Optional[TokenKey] = None

    @property
    def pending(self) -> bool:
        return self.status is not TransferStatus.DELIVERED

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "from_chain": self.from_chain,
            "to_chain": self.to_chain,
            "beneficiary": self.beneficiary,
            "token": None if self.token is None else [str(self.token[0]), self.token[1]],
            "amount": self.amount,
            "submitted_tick": self.submitted_tick,
            "delivery_tick": self.delivery_tick,
            "status": self.status.value,
            "result": None if self.result is None else [str(self.result[0]), self.result[1]],
        }


@dataclass
class PegAccount:
    sidechain: str
    main_chain_locked: int = 0


class BridgeHub:
    def __init__(self, world: "WorldState") -> None:
        self.world = world
        self.configs: dict[ChainPair, BridgeConfig] = {}
        self.transfers: dict[int, BridgeTransfer] = {}
        self.pegs: dict[str, PegAccount] = {}
        self.delays: dict[ChainPair, int] = {}
        self.fail_ids: set[int] = set()
        self._channel_tail: dict[ChainPair, int] = {}

    # -- configuration -----------------------------------------------------

    def set_bridges(self, chain_a: str, addr_a: str, chain_b: str, addr_b: str) -> BridgeConfig:
        la, lb = self.world.ledger(chain_a), self.world.ledger(chain_b)
        if chain_a == chain_b:
            raise errors.SameChain(chain_a)
        key = pair_key(chain_a, chain_b)
        cfg = self.configs.get(key)
        if cfg is not None and cfg.set_once:
            raise errors.AlreadySet(f"bridges for {key[0]}<->{key[1]} already set")
        for ledger, addr in ((la, addr_a), (lb, addr_b)):
            if (
                not isinstance(addr, str)
                or not addr
                or self.world.is_reserved(addr)
                or self.world.address_in_use(addr)
            ):
                raise errors.InvalidAddress(f"{addr!r} is not usable as a bridge on {ledger.chain}")
        if addr_a == addr_b:
            raise errors.InvalidAddress("bridge addresses must differ")
        cfg = BridgeConfig(key, {chain_a: addr_a, chain_b: addr_b}, set_once=True)
        self.configs[key] = cfg
        la.add_system_account(addr_a)
        lb.add_system_account(addr_b)
        self.world.emit("BridgesSet", chains=list(key), bridges=[cfg.address(key[0]), cfg.address(key[1])])
        return cfg

    def config(self, a: str, b: str) -> BridgeConfig:
        cfg = self.configs.get(pair_key(a, b))
        if cfg is None or not cfg.set_once:
            raise errors.BridgesNotSet(f"no bridge between {a} and {b}")
        return cfg

    def bridge_addresses(self, chain: str) -> dict[str, str]:
        """Bridge address on ``chain`` keyed by the counterpart chain."""
        out = {}
        for cfg in self.configs.values():
            if chain in cfg.chains:
                out[cfg.other(chain)] = cfg.address(chain)
        return out

    def set_delay(self, from_chain: str, to_chain: str, ticks: int) -> None:
        self.world.ledger(from_chain)
        self.world.ledger(to_chain)
        if isinstance(ticks, bool) or not isinstance(ticks, int) or ticks < 1:
            raise errors.InvalidDelay(f"relay delay must be a positive integer, got {ticks!r}")
        self.delays[(from_chain, to_chain)] = ticks

    def delay(self, from_chain: str, to_chain: str) -> int:
        return self.delays.get((from_chain, to_chain), DEFAULT_DELAY)

    def inject_fault(self, ids: Iterable[int]) -> None:
        for i in ids:
            if isinstance(i, bool) or not isinstance(i, int) or i < 1:
                raise errors.UnknownTransfer(f"bad transfer id {i!r}")
            self.fail_ids.add(i)

    # -- scheduling --------------------------------------------------------

    def _schedule_tick(self, from_chain: str, to_chain: str) -> int:
        now = self.world.clock.tick
        ch = (from_chain, to_chain)
        tick = max(now + self.delay(from_chain, to_chain), self._channel_tail.get(ch, 0))
        self._channel_tail[ch] = tick
        return tick

    def _schedule(self, kind: TransferKind, from_chain: str, to_chain: str, beneficiary: str,
                  token: Optional[TokenKey] = None, amount: Optional[int] = None) -> BridgeTransfer:
        t = BridgeTransfer(
            id=len(self.transfers) + 1,
            kind=kind,
            from_chain=from_chain,
            to_chain=to_chain,
            beneficiary=beneficiary,
            submitted_tick=self.world.clock.tick,
            delivery_tick=self._schedule_tick(from_chain, to_chain),
            token=token,
            amount=amount,
        )
        self.transfers[t.id] = t
        self.world.emit(
            "TransferScheduled",
            transfer_id=t.id,
            kind=kind.value,
            from_chain=from_chain,
            to_chain=to_chain,
            delivery_tick=t.delivery_tick,
        )
        return t

    def transfer(self, transfer_id: int) -> BridgeTransfer:
        try:
            return self.transfers[transfer_id]
        except (KeyError, TypeError):
            raise errors.UnknownTransfer(str(transfer_id)) from None

    def pending(self) -> list[BridgeTransfer]:
        return [t for t in self.transfers.values() if t.pending]

    # -- NFT path ----------------------------------------------------------

    def lock_nft(self, caller: str, contract, token_id: int, to_chain: str) -> BridgeTransfer:
        tokens = self.world.tokens
        rec = tokens.live_record(contract, token_id)
        if caller != rec.owner:
            raise errors.NotOwner(f"{caller} does not own {rec.contract}#{token_id}")
        if rec.origin is not None:
            raise errors.WrappedToken(f"{rec.contract}#{token_id} is a wrapped representation")
        home = rec.contract.chain
        self.world.ledger(to_chain)
        if to_chain == home:
            raise errors.SameChain(to_chain)
        cfg = self.config(home, to_chain)

        tokens._move(rec, cfg.address(home))
        rec.status = TokenStatus.BRIDGE_LOCKED
        self.world.emit(
            "NFTLocked",
            tokenId=rec.token_id,
            fromChain=home,
            toChain=to_chain,
            nftContract=rec.contract.address,
        )
        return self._schedule(TransferKind.NFT_LOCK, home, to_chain, caller, token=rec.key)

    def burn_wrapped(self, caller: str, contract, token_id: int) -> BridgeTransfer:
        tokens = self.world.tokens
        rec = tokens.record(contract, token_id)
        if rec.origin is None:
            raise errors.NotWrapped(f"{rec.contract}#{token_id} is not a wrapped token")
        if not rec.live:
            raise errors.TokenNotLive(f"{rec.contract}#{token_id} is {rec.status.value}")
        if caller != rec.owner:
            raise errors.NotOwner(f"{caller} does not own {rec.contract}#{token_id}")
        origin_chain = rec.origin[0].chain
        self.config(rec.contract.chain, origin_chain)

        rec.status = TokenStatus.BURNED
        rec.approved = None
        self.world.emit(
            "WrappedBurned",
            contract=str(rec.contract),
            token_id=rec.token_id,
            owner=caller,
            origin=[str(rec.origin[0]), rec.origin[1]],
        )
        return self._schedule(TransferKind.NFT_RETURN, rec.contract.chain, origin_chain, caller, token=rec.origin)

    def unlock_nft(self, caller_bridge: str, contract, token_id: int, beneficiary: str) -> NftRecord:
        """Release a locked origin NFT; only the counterpart bridge may call this."""
        tokens = self.world.tokens
        rec = tokens.record(contract, token_id)
        home = rec.contract.chain
        counterparts = self.bridge_addresses(home)  # other chain -> bridge addr on home
        custody_pair = None
        if rec.status is TokenStatus.BRIDGE_LOCKED:
            custody_pair = next((other for other, addr in counterparts.items() if addr == rec.owner), None)
        if custody_pair is not None:
            allowed = {self.config(home, custody_pair).address(custody_pair)}
        else:
            allowed = {self.config(home, other).address(other) for other in counterparts}
        if caller_bridge not in allowed:
            raise errors.UnauthorizedBridge(f"{caller_bridge!r} is not the counterpart bridge for {rec.contract}")
        if rec.status is not TokenStatus.BRIDGE_LOCKED:
            raise errors.TokenNotLocked(f"{rec.contract}#{token_id} is {rec.status.value}")
        self.world.check_user(beneficiary)

        tokens._move(rec, beneficiary)
        rec.status = TokenStatus.LIVE
        self.world.emit(
            "NFTUnlocked",
            tokenId=rec.token_id,
            fromChain=custody_pair,
            toChain=home,
            nftContract=rec.contract.address,
        )
        return rec

    # -- peg path ----------------------------------------------------------

    def _main(self) -> str:
        main = self.world.main_chain
        if main is None:
            raise errors.UnknownChain("no main chain configured")
        return main

    def peg(self, sidechain: str) -> PegAccount:
        return self.pegs.setdefault(sidechain, PegAccount(sidechain))

    def peg_lock(self, caller: str, amount: int, to_chain: str) -> BridgeTransfer:
        main = self._main()
        self.world.check_user(caller)
        check_amount(amount)
        self.world.ledger(to_chain)
        if to_chain == main:
            raise errors.SameChain(to_chain)
        cfg = self.config(main, to_chain)
        main_ledger = self.world.ledger(main)
        main_ledger.require(caller, amount)

        main_ledger.transfer(caller, cfg.address(main), amount)
        self.peg(to_chain).main_chain_locked += amount
        self.world.emit("PegLocked", chain=main, toChain=to_chain, account=caller, amount=amount)
        return self._schedule(TransferKind.PEG_LOCK, main, to_chain, caller, amount=amount)

    def peg_burn(self, caller: str, amount: int, chain: str) -> BridgeTransfer:
        main = self._main()
        self.world.check_user(caller)
        check_amount(amount)
        fl = self.world.tokens.fungible_ledger(chain)
        if chain == main:
            raise errors.SameChain(f"peg_burn runs on a sidechain, not {main}")
        self.config(main, chain)
        have = fl.balance(caller)
        if have < amount:
            raise errors.InsufficientBalance(f"{caller} holds {have} tokens on {chain}, needs {amount}")

        self.world.tokens._fungible_burn(chain, caller, amount)
        self.world.emit("PegBurned", chain=chain, toChain=main, account=caller, amount=amount)
        return self._schedule(TransferKind.PEG_BURN, chain, main, caller, amount=amount)

    # -- relay -------------------------------------------------------------

    def deliver(self) -> list[BridgeTransfer]:
        """Deliver (or fail) every in-flight transfer due at the current tick."""
        now = self.world.clock.tick
        due = sorted(
            (t for t in self.transfers.values()
             if t.status is TransferStatus.IN_FLIGHT and t.delivery_tick <= now),
            key=lambda t: (t.delivery_tick, t.id),
        )
        done = []
        for t in due:
            if self.deliver_one(t.id):
                done.append(t)
        return done

    def deliver_one(self, transfer_id: int) -> bool:
        """Apply one transfer.  Returns False when it failed or was already applied."""
        t = self.transfer(transfer_id)
        if t.status is not TransferStatus.IN_FLIGHT:
            return False
        if t.id in self.fail_ids:
            self.fail_ids.discard(t.id)
            t.status = TransferStatus.FAILED
            self.world.emit("TransferFailed", transfer_id=t.id, kind=t.kind.value)
            return False

        tokens = self.world.tokens
        if t.kind is TransferKind.NFT_LOCK:
            origin = tokens.record(*t.token)
            wrapped = tokens.contract(tokens.wrapped_contract(t.to_chain))
            rec = tokens._mint(wrapped, t.beneficiary, origin.uri, origin.metadata_hash,
                               origin.mint_price, origin=origin.key)
            t.result = rec.key
        elif t.kind is TransferKind.NFT_RETURN:
            cfg = self.config(t.from_chain, t.to_chain)
            self.unlock_nft(cfg.address(t.from_chain), t.token[0], t.token[1], t.beneficiary)
        elif t.kind is TransferKind.PEG_LOCK:
            tokens._fungible_mint(t.to_chain, t.beneficiary, t.amount)
        else:
            cfg = self.config(t.from_chain, t.to_chain)
            self.world.ledger(t.to_chain).transfer(cfg.address(t.to_chain), t.beneficiary, t.amount)
            self.peg(t.from_chain).main_chain_locked -= t.amount
        t.status = TransferStatus.DELIVERED
        self.world.emit("TransferDelivered", transfer_id=t.id, kind=t.kind.value)
        return True

    def retry_transfer(self, transfer_id: int) -> BridgeTransfer:
        t = self.transfer(transfer_id)
        if t.status is not TransferStatus.FAILED:
            raise errors.NotRetryable(f"transfer {transfer_id} is {t.status.value}")
        t.status = TransferStatus.IN_FLIGHT
        t.delivery_tick = self._schedule_tick(t.from_chain, t.to_chain)
        self.world.emit("TransferRetried", transfer_id=t.id, delivery_tick=t.delivery_tick)
        return t
