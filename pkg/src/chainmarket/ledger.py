"""Per-chain native balances and the logical clock.

All value movement goes through :meth:`ChainLedger.transfer`, which is
double-entry: the chain's total supply only changes through
:meth:`ChainLedger.credit` (the faucet).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from . import errors

MAX_AMOUNT = 2**128 - 1
MAX_CHAIN_ID_LEN = 32

# Reserved per-chain custody accounts.  User addresses may not start with "@".
ESCROW_CUSTODY = "@escrow"
AUCTION_CUSTODY = "@auction"
MARKET_OPERATOR = "@market"
WRAPPED_CONTRACT = "@wrapped"
SYSTEM_PREFIX = "@"

Emit = Callable[..., Any]


def check_chain_id(chain: Any) -> str:
    if not isinstance(chain, str) or not chain or len(chain) > MAX_CHAIN_ID_LEN or not chain.isascii():
        raise errors.InvalidChainId(f"bad chain id {chain!r}")
    return chain


def check_address(addr: Any) -> str:
    if not isinstance(addr, str) or not addr:
        raise errors.InvalidAddress(f"bad address {addr!r}")
    return addr


def check_user_address(addr: Any) -> str:
    check_address(addr)
    if addr.startswith(SYSTEM_PREFIX):
        raise errors.ReservedAccount(addr)
    return addr


def check_amount(amount: Any) -> int:
    # bool is an int subclass; reject it explicitly.
    if isinstance(amount, bool) or not isinstance(amount, int) or amount < 0:
        raise errors.InvalidAmount(f"amount must be an unsigned integer, got {amount!r}")
    if amount > MAX_AMOUNT:
        raise errors.Overflow(f"amount {amount} exceeds 128-bit range")
    return amount


@dataclass
class Clock:
    tick: int = 0

    def advance(self, ticks: int) -> int:
        self.tick += check_amount(ticks)
        return self.tick


@dataclass
class ChainLedger:
    chain: str
    emit: Emit = field(repr=False, compare=False)
    balances: dict[str, int] = field(default_factory=dict)
    system_accounts: set[str] = field(default_factory=set)
    minted: int = 0

    def __post_init__(self) -> None:
        for acct in (ESCROW_CUSTODY, AUCTION_CUSTODY, MARKET_OPERATOR):
            self.add_system_account(acct)

    def add_system_account(self, addr: str) -> None:
        self.system_accounts.add(addr)
        self.balances.setdefault(addr, 0)

    def balance(self, addr: str) -> int:
        return self.balances.get(addr, 0)

    @property
    def supply(self) -> int:
        return sum(self.balances.values())

    def require(self, addr: str, amount: int) -> None:
        """Raise InsufficientBalance unless ``addr`` can pay ``amount``."""
        have = self.balance(addr)
        if have < amount:
            raise errors.InsufficientBalance(
                f"{addr} holds {have} on {self.chain}, needs {amount}"
            )

    def check_receive(self, addr: str, amount: int) -> None:
        if self.balance(addr) + amount > MAX_AMOUNT:
            raise errors.Overflow(f"balance of {addr} on {self.chain} would overflow")

    def credit(self, to: str, amount: int) -> None:
        check_amount(amount)
        self.check_receive(to, amount)
        self.balances[to] = self.balance(to) + amount
        self.minted += amount
        self.emit("Credit", chain=self.chain, to=to, amount=amount)

    def transfer(self, frm: str, to: str, amount: int) -> None:
        check_amount(amount)
        self.require(frm, amount)
        if frm != to:
            self.check_receive(to, amount)
            self.balances[frm] = self.balance(frm) - amount
            self.balances[to] = self.balance(to) + amount
        self.emit("Transfer", chain=self.chain, **{"from": frm}, to=to, amount=amount)

    def to_dict(self) -> dict[str, int]:
        return {k: v for k, v in sorted(self.balances.items()) if v or k in self.system_accounts}
