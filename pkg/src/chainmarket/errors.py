"""Exception hierarchy for the simulator.

Every protocol guard raises a subclass of :class:`SimError`.  Scenario files
refer to errors by class name (``"expect_error": "WrongValue"``), so the class
names are part of the file format and must not be renamed casually.
"""

from __future__ import annotations


class SimError(Exception):
    """Base class for every rejected operation."""

    @property
    def code(self) -> str:
        return type(self).__name__


# ledger
class DuplicateChain(SimError):
    pass


class UnknownChain(SimError):
    pass


class InvalidChainId(SimError):
    pass


class InvalidAddress(SimError):
    pass


class InvalidArgument(SimError):
    pass


class InvalidAmount(InvalidArgument):
    pass


class Overflow(SimError):
    pass


class InsufficientBalance(SimError):
    pass


class ReservedAccount(SimError):
    """A user-facing operation named a system custody account."""


# token
class DuplicateContract(SimError):
    pass


class UnknownContract(SimError):
    pass


class NotAuthorizedMinter(SimError):
    pass


class UnknownToken(SimError):
    pass


class NotOwner(SimError):
    pass


class NotAuthorized(SimError):
    pass


class TokenNotLive(SimError):
    pass


# metadata store
class NotFound(SimError):
    pass


class InvalidHash(SimError):
    pass


# bridge
class AlreadySet(SimError):
    pass


class BridgesNotSet(SimError):
    pass


class SameChain(SimError):
    pass


class NotWrapped(SimError):
    pass


class WrappedToken(SimError):
    """Wrapped representations return home via burn, they cannot be re-locked."""


class UnauthorizedBridge(SimError):
    pass


class TokenNotLocked(SimError):
    pass


class UnknownTransfer(SimError):
    pass


class NotRetryable(SimError):
    pass


class InvalidDelay(SimError):
    pass


# escrow
class UnknownEscrow(SimError):
    pass


class IdenticalParties(SimError):
    pass


class ZeroAmount(SimError):
    pass


class NotBuyer(SimError):
    pass


class WrongValue(SimError):
    pass


class WrongState(SimError):
    pass


class NotParty(SimError):
    pass


class NotArbitrator(SimError):
    pass


# marketplace
class DuplicateRegistration(SimError):
    pass


class NotRegistered(SimError):
    pass


class ContractNotPreserved(SimError):
    pass


class WrongChain(SimError):
    pass


class AlreadyListed(SimError):
    pass


class ZeroPrice(SimError):
    pass


class UnknownListing(SimError):
    pass


class ListingInactive(SimError):
    pass


class OwnershipChanged(SimError):
    pass


class NotListingOwner(SimError):
    pass


class UnknownOrder(SimError):
    pass


class OrderNotOpen(SimError):
    pass


class ZeroDuration(SimError):
    pass


class UnknownAuction(SimError):
    pass


class AuctionClosed(SimError):
    pass


class AuctionStillOpen(SimError):
    pass


class AlreadySettled(SimError):
    pass


class BidTooLow(SimError):
    pass


class SelfBid(SimError):
    pass


class UnknownSale(SimError):
    pass


class NotPartyToSale(SimError):
    pass


class DuplicateRating(SimError):
    pass


class InvalidScore(SimError):
    pass


class InvalidRole(SimError):
    pass


def error_names() -> set[str]:
    """Names usable in ``expect_error`` clauses."""
    out = set()
    stack = [SimError]
    while stack:
        cls = stack.pop()
        out.add(cls.__name__)
        stack.extend(cls.__subclasses__())
    return out
