from pathlib import Path

import pytest

from chainmarket import WorldState
from chainmarket.metadata_store import encode_metadata

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"
ART = "eth-main/art"


def make_market(extra_chains=(), buyers=("B", "C"), funds=5000) -> WorldState:
    """eth-main + bsc bridged, seller S with contract eth-main/art, funded buyers."""
    w = WorldState(market_owner="M", main_chain="eth-main")
    for chain in ("eth-main", "bsc", *extra_chains):
        w.create_chain(chain)
    w.bridge.set_bridges("eth-main", "eth-bridge", "bsc", "bsc-bridge")
    w.market.register_participant("S", {"Artist", "Seller"}, True)
    for b in buyers:
        w.market.register_participant(b, {"Buyer"}, True)
        w.credit("eth-main", b, funds)
    w.tokens.register_contract("eth-main", "art")
    w.market.register_seller_contract("S", ART)
    return w


def mint(w: WorldState, name="Sunrise", price=300, contract=ART, caller="S") -> int:
    h = w.put_metadata(encode_metadata({"name": name}))
    return w.tokens.mint_nft(contract, caller, f"ipfs://{name}", h, price)


@pytest.fixture
def market():
    return make_market()


@pytest.fixture
def minted(market):
    return market, mint(market)


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
