"""NFT registry with single-slot approvals, plus the per-chain fungible token."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple, Optional

from . import errors
from .ledger import MAX_AMOUNT, WRAPPED_CONTRACT, check_address, check_amount
from .metadata_store import check_hash

if TYPE_CHECKING:
    from .world import WorldState


class ContractId(NamedTuple):
    chain: str
    address: str

    def __str__(self) -> str:
        return f"{self.chain}/{self.address}"

    @classmethod
    def parse(cls, value) -> "ContractId":
        """Accept ``ContractId``, a 2-sequence, or ``"chain/address"``."""
        if isinstance(value, ContractId):
            return value
        if isinstance(value, str) and "/" in value:
            chain, _, addr = value.partition("/")
            return cls(chain, addr)
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return cls(str(value[0]), str(value[1]))
        raise errors.UnknownContract(f"cannot parse contract id {value!r}")


class TokenStatus(str, enum.Enum):
    LIVE = "Live"
    BRIDGE_LOCKED = "BridgeLocked"
    BURNED = "Burned"


TokenKey = tuple[ContractId, int]


@dataclass
class NftRecord:
    contract: ContractId
    token_id: int
    owner: str
    uri: str
    metadata_hash: str
    mint_price: int
    approved: Optional[str] = None
    origin: Optional[TokenKey] = None
    status: TokenStatus = TokenStatus.LIVE

    @property
    def key(self) -> TokenKey:
        return (self.contract, self.token_id)

    @property
    def live(self) -> bool:
        return self.status is TokenStatus.LIVE

    def to_dict(self) -> dict:
        return {
            "contract": str(self.contract),
            "token_id": self.token_id,
            "owner": self.owner,
            "approved": self.approved,
            "uri": self.uri,
            "metadata_hash": self.metadata_hash,
            "mint_price": self.mint_price,
            "origin": None if self.origin is None else [str(self.origin[0]), self.origin[1]],
            "status": self.status.value,
        }


@dataclass
class NftContract:
    id: ContractId
    bridge_owned: bool = False
    minter: Optional[str] = None
    counter: int = 0
    tokens: dict[int, NftRecord] = field(default_factory=dict)


@dataclass
class FungibleLedger:
    chain: str
    balances: dict[str, int] = field(default_factory=dict)

    def balance(self, addr: str) -> int:
        return self.balances.get(addr, 0)

    @property
    def supply(self) -> int:
        return sum(self.balances.values())


class TokenRegistry:
    """All NFT contracts and fungible ledgers of a world."""

    def __init__(self, world: "WorldState") -> None:
        self.world = world
        self.contracts: dict[ContractId, NftContract] = {}
        self.fungible: dict[str, FungibleLedger] = {}

    # -- chain hooks -------------------------------------------------------

    def add_chain(self, chain: str) -> None:
        self.fungible[chain] = FungibleLedger(chain)
        cid = ContractId(chain, WRAPPED_CONTRACT)
        self.contracts[cid] = NftContract(cid, bridge_owned=True)

    def wrapped_contract(self, chain: str) -> ContractId:
        return ContractId(chain, WRAPPED_CONTRACT)

    # -- contracts ---------------------------------------------------------

    def register_contract(self, chain: str, address: str) -> ContractId:
        self.world.ledger(chain)
        check_address(address)
        cid = ContractId(chain, address)
        if cid in self.contracts:
            raise errors.DuplicateContract(str(cid))
        self.contracts[cid] = NftContract(cid)
        self.world.emit("ContractRegistered", contract=str(cid))
        return cid

    def contract(self, cid) -> NftContract:
        cid = ContractId.parse(cid)
        try:
            return self.contracts[cid]
        except KeyError:
            raise errors.UnknownContract(str(cid)) from None

    def set_minter(self, cid: ContractId, minter: str) -> None:
        self.contract(cid).minter = minter

    # -- NFTs --------------------------------------------------------------

    def record(self, cid, token_id: int) -> NftRecord:
        """Any record, burned ones included."""
        c = self.contract(cid)
        try:
            return c.tokens[token_id]
        except (KeyError, TypeError):
            raise errors.UnknownToken(f"{c.id}#{token_id}") from None

    def live_record(self, cid, token_id: int) -> NftRecord:
        rec = self.record(cid, token_id)
        if not rec.live:
            raise errors.TokenNotLive(f"{rec.contract}#{token_id} is {rec.status.value}")
        return rec

    def records(self):
        for cid in sorted(self.contracts):
            c = self.contracts[cid]
            for tid in sorted(c.tokens):
                yield c.tokens[tid]

    def mint_nft(self, cid, caller: str, uri: str, metadata_hash: str, mint_price: int) -> int:
        c = self.contract(cid)
        if c.bridge_owned or c.minter is None or caller != c.minter:
            raise errors.NotAuthorizedMinter(f"{caller} may not mint on {c.id}")
        if not isinstance(uri, str):
            raise errors.InvalidArgument(f"uri must be a string, got {uri!r}")
        h = check_hash(metadata_hash)
        check_amount(mint_price)
        return self._mint(c, caller, uri, h, mint_price, origin=None).token_id

    def _mint(self, c: NftContract, owner: str, uri: str, metadata_hash: str,
              mint_price: int, origin: Optional[TokenKey]) -> NftRecord:
        c.counter += 1
        rec = NftRecord(c.id, c.counter, owner, uri, metadata_hash, mint_price, origin=origin)
        c.tokens[rec.token_id] = rec
        self.world.emit(
            "Minted",
            contract=str(c.id),
            token_id=rec.token_id,
            owner=owner,
            metadata_hash=metadata_hash,
        )
        return rec

    def owner_of(self, cid, token_id: int) -> str:
        rec = self.record(cid, token_id)
        if rec.status is TokenStatus.BURNED:
            raise errors.UnknownToken(f"{rec.contract}#{token_id} was burned")
        return rec.owner

    def approve(self, cid, caller: str, token_id: int, operator: str) -> None:
        rec = self.live_record(cid, token_id)
        if caller != rec.owner:
            raise errors.NotOwner(f"{caller} does not own {rec.contract}#{token_id}")
        check_address(operator)
        self._approve(rec, operator)

    def _approve(self, rec: NftRecord, operator: Optional[str]) -> None:
        rec.approved = operator
        self.world.emit(
            "Approval",
            contract=str(rec.contract),
            token_id=rec.token_id,
            owner=rec.owner,
            operator=operator,
        )

    def check_transfer(self, cid, caller: str, token_id: int) -> NftRecord:
        rec = self.live_record(cid, token_id)
        if caller != rec.owner and caller != rec.approved:
            raise errors.NotAuthorized(f"{caller} may not move {rec.contract}#{token_id}")
        return rec

    def transfer_nft(self, cid, caller: str, token_id: int, to: str) -> None:
        rec = self.check_transfer(cid, caller, token_id)
        self.world.check_user(to)
        self._move(rec, to)

    def _move(self, rec: NftRecord, to: str) -> None:
        frm = rec.owner
        rec.owner = to
        rec.approved = None
        self.world.emit(
            "NftTransferred",
            contract=str(rec.contract),
            token_id=rec.token_id,
            **{"from": frm},
            to=to,
        )

    # -- fungible ----------------------------------------------------------

    def fungible_ledger(self, chain: str) -> FungibleLedger:
        self.world.ledger(chain)
        return self.fungible[chain]

    def balance_of(self, chain: str, account: str) -> int:
        return self.fungible_ledger(chain).balance(account)

    def transfer_fungible(self, chain: str, caller: str, to: str, amount: int) -> None:
        fl = self.fungible_ledger(chain)
        check_amount(amount)
        self.world.check_user(to)
        have = fl.balance(caller)
        if have < amount:
            raise errors.InsufficientBalance(f"{caller} holds {have} tokens on {chain}, needs {amount}")
        if caller != to:
            if fl.balance(to) + amount > MAX_AMOUNT:
                raise errors.Overflow(f"token balance of {to} on {chain} would overflow")
            fl.balances[caller] = have - amount
            fl.balances[to] = fl.balance(to) + amount
        self.world.emit("Transfer", chain=chain, token="fungible", **{"from": caller}, to=to, amount=amount)

    def _fungible_mint(self, chain: str, to: str, amount: int) -> None:
        fl = self.fungible[chain]
        fl.balances[to] = fl.balance(to) + amount
        self.world.emit("FungibleMinted", chain=chain, to=to, amount=amount)

    def _fungible_burn(self, chain: str, frm: str, amount: int) -> None:
        fl = self.fungible[chain]
        fl.balances[frm] = fl.balance(frm) - amount
        self.world.emit("FungibleBurned", chain=chain, **{"from": frm}, amount=amount)
