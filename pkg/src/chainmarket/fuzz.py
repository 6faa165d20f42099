"""Random scenario generation for invariant stress runs.

The generator drives a live world so it can pick plausible arguments (owned
tokens, open listings, in-flight transfers) while still throwing in a share of
invalid calls.  Every emitted command records the outcome it produced as
``expect_error``, so the generated file replays with exit status 0 unless an
invariant breaks.
"""

from __future__ import annotations

import json
import random

from .bridge import TransferStatus
from .marketplace import AuctionStatus, OrderStatus
from .metadata_store import content_hash, encode_metadata
from .scenario import Command, Runner, Scenario, build_report, parse_command, world_for

MAIN = "eth-main"
SIDES = ("bsc", "polygon")
USERS = tuple(f"u{i}" for i in range(1, 7))
SELLERS = ("s1", "s2")
BRIDGES = ("eth-bsc-bridge", "bsc-eth-bridge", "eth-polygon-bridge", "polygon-eth-bridge")


def _setup() -> list[dict]:
    cmds: list[dict] = []
    for chain in (MAIN, *SIDES):
        cmds.append({"op": "create_chain", "chain": chain})
    cmds.append({"op": "set_bridges", "chain_a": MAIN, "bridge_a": "eth-bsc-bridge",
                 "chain_b": "bsc", "bridge_b": "bsc-eth-bridge"})
    cmds.append({"op": "set_bridges", "chain_a": MAIN, "bridge_a": "eth-polygon-bridge",
                 "chain_b": "polygon", "bridge_b": "polygon-eth-bridge"})
    for s in SELLERS:
        cmds.append({"op": "register_participant", "address": s, "roles": ["Artist", "Seller"], "kyc": True})
    for i, u in enumerate(USERS):
        cmds.append({"op": "register_participant", "address": u, "roles": ["Buyer"], "kyc": i != 0})
    for chain in (MAIN, *SIDES):
        for who in (*SELLERS, *USERS):
            cmds.append({"op": "credit", "chain": chain, "to": who, "amount": 10_000})
    for s in SELLERS:
        cmds.append({"op": "register_contract", "chain": MAIN, "address": f"{s}-nft"})
        cmds.append({"op": "register_seller_contract", "seller": s, "contract": f"{MAIN}/{s}-nft"})
    return cmds


class Generator:
    def __init__(self, rng: random.Random, runner: Runner) -> None:
        self.rng = rng
        self.runner = runner
        self.world = runner.world
        self.minted = 0

    def anyone(self) -> str:
        # now and then a bridge address, which user-facing calls must refuse
        if self.rng.random() < 0.03:
            return self.rng.choice(BRIDGES)
        return self.rng.choice(USERS + SELLERS)

    def some_token(self, live_only: bool = True):
        recs = [r for r in self.world.tokens.records() if r.live or not live_only]
        return self.rng.choice(recs) if recs else None

    def propose(self) -> list[dict]:
        out = self._propose()
        return out if isinstance(out, list) else [out]

    def _propose(self):
        r = self.rng
        w = self.world
        kind = r.choice([
            "mint", "mint", "list", "buy", "unlist", "sell", "buy_order", "transfer",
            "auction", "bid", "bid", "settle", "advance", "advance",
            "lock", "burn", "retry", "fault", "peg_lock", "peg_burn", "fungible",
            "escrow", "pay", "deliver", "refund", "rate", "native",
        ])
        if kind == "mint":
            s = r.choice(SELLERS)
            self.minted += 1
            doc = {"name": f"art-{self.minted}"}
            h = content_hash(encode_metadata(doc))
            mint = {"op": "mint_nft", "contract": f"{MAIN}/{s}-nft", "caller": r.choice([s, s, s, self.anyone()]),
                    "uri": f"ipfs://art-{self.minted}", "metadata_hash": h, "mint_price": r.randrange(0, 500)}
            return [{"op": "put_metadata", "data": doc}, mint]
        if kind in ("list", "sell", "auction", "transfer", "lock", "burn"):
            rec = self.some_token()
            if rec is None:
                return {"op": "advance_time", "ticks": 1}
            owner = rec.owner if r.random() < 0.85 else self.anyone()
            base = {"contract": str(rec.contract), "token_id": rec.token_id, "caller": owner}
            if kind == "list":
                return {"op": "list_nft", **base, "price": r.randrange(1, 3000), "chain": rec.contract.chain}
            if kind == "sell":
                return {"op": "sell_nft", **base, "price": r.randrange(1, 3000)}
            if kind == "auction":
                cmd = {"op": "start_auction", **base, "duration": r.randrange(1, 6)}
                if r.random() < 0.5:
                    cmd["start_price"] = r.randrange(0, 800)
                return cmd
            if kind == "transfer":
                return {"op": "transfer_nft", **base, "to": self.anyone()}
            if kind == "lock":
                return {"op": "lock_nft", **base, "to_chain": r.choice(SIDES)}
            return {"op": "burn_wrapped", **base}
        if kind == "buy":
            active = [l for l in w.market.listings.values() if l.active] or list(w.market.listings.values())
            if not active:
                return {"op": "advance_time", "ticks": 1}
            l = r.choice(active)
            pay = l.price if r.random() < 0.85 else l.price + r.choice([-1, 1])
            return {"op": "buy_nft", "caller": self.anyone(), "listing_id": l.id, "payment": max(pay, 0)}
        if kind == "buy_order":
            open_ = [o for o in w.market.orders.values() if o.status is OrderStatus.OPEN] or list(w.market.orders.values())
            if not open_:
                return {"op": "advance_time", "ticks": 1}
            o = r.choice(open_)
            return {"op": "buy_order", "caller": self.anyone(), "order_id": o.id, "payment": o.price}
        if kind == "unlist":
            if not w.market.listings:
                return {"op": "advance_time", "ticks": 1}
            l = w.market.listings[r.randrange(1, len(w.market.listings) + 1)]
            return {"op": "unlist_nft", "caller": l.seller if r.random() < 0.8 else self.anyone(), "listing_id": l.id}
        if kind == "bid":
            open_ = [a for a in w.market.auctions.values() if a.status is AuctionStatus.OPEN]
            if not open_:
                return {"op": "advance_time", "ticks": 1}
            a = r.choice(open_)
            top = a.highest[1] if a.bids else a.start_price
            return {"op": "place_bid", "caller": self.anyone(), "auction_id": a.id,
                    "amount": max(1, top + r.randrange(-5, 400))}
        if kind == "settle":
            if not w.market.auctions:
                return {"op": "advance_time", "ticks": 1}
            return {"op": "settle_auction", "auction_id": r.randrange(1, len(w.market.auctions) + 1)}
        if kind == "advance":
            return {"op": "advance_time", "ticks": r.randrange(0, 4)}
        if kind == "retry":
            failed = [t for t in w.bridge.transfers.values() if t.status is TransferStatus.FAILED]
            if not failed:
                return {"op": "advance_time", "ticks": 1}
            return {"op": "retry_transfer", "transfer_id": r.choice(failed).id}
        if kind == "fault":
            nxt = len(w.bridge.transfers) + 1
            if r.random() < 0.5:
                return {"op": "inject_fault", "fail": [nxt + r.randrange(0, 3)]}
            a, b = r.choice([(MAIN, s) for s in SIDES] + [(s, MAIN) for s in SIDES])
            return {"op": "inject_fault", "from_chain": a, "to_chain": b, "ticks": r.randrange(1, 5)}
        if kind == "peg_lock":
            return {"op": "peg_lock", "caller": self.anyone(), "amount": r.randrange(0, 2000), "to_chain": r.choice(SIDES)}
        if kind == "peg_burn":
            side = r.choice(SIDES)
            who = self.anyone()
            bal = w.tokens.balance_of(side, who)
            return {"op": "peg_burn", "caller": who, "amount": r.randrange(0, bal + 2), "chain": side}
        if kind == "fungible":
            side = r.choice(SIDES)
            return {"op": "transfer_fungible", "chain": side, "caller": self.anyone(), "to": self.anyone(),
                    "amount": r.randrange(0, 300)}
        if kind == "escrow":
            b, s, a = r.sample(USERS, 3)
            return {"op": "open_escrow", "chain": r.choice((MAIN, *SIDES)), "buyer": b, "seller": s,
                    "arbitrator": a, "amount": r.randrange(1, 1500)}
        if kind in ("pay", "deliver", "refund"):
            if not w.escrow.accounts:
                return {"op": "advance_time", "ticks": 1}
            e = w.escrow.accounts[r.randrange(1, len(w.escrow.accounts) + 1)]
            if kind == "pay":
                return {"op": "confirm_payment", "escrow_id": e.id, "caller": e.buyer,
                        "value": e.amount if r.random() < 0.9 else e.amount + 1}
            if kind == "deliver":
                return {"op": "confirm_delivery", "escrow_id": e.id,
                        "caller": r.choice([e.buyer, e.seller, e.arbitrator])}
            return {"op": "refund", "escrow_id": e.id, "caller": r.choice([e.arbitrator, e.arbitrator, e.buyer])}
        if kind == "rate":
            if not w.market.sales:
                return {"op": "advance_time", "ticks": 1}
            s = w.market.sales[r.randrange(1, len(w.market.sales) + 1)]
            return {"op": "rate_counterparty", "caller": s.buyer, "sale_id": s.id, "target": s.seller,
                    "score": r.randrange(0, 7)}
        return {"op": "transfer_native", "chain": r.choice((MAIN, *SIDES)), "from": self.anyone(),
                "to": self.anyone(), "amount": r.randrange(0, 3000)}


def _apply_recording(runner: Runner, obj: dict) -> Command:
    """Run one command, then pin its outcome as ``expect_error`` for replay."""
    cmd = parse_command(obj, line=0)
    runner.step(cmd)
    if runner.failures and runner.failures[-1]["step"] == runner.steps:
        code = runner.failures.pop()["detail"].split(":", 1)[0]
        cmd.expect_error = code
    return cmd


def fuzz(steps: int, seed: int):
    """Generate and run a random scenario.  Returns (scenario, report)."""
    rng = random.Random(seed)
    scenario = Scenario(name=f"fuzz-{seed}", commands=[], main_chain=MAIN)
    world = world_for(scenario)
    runner = Runner(world, strict=False)
    gen = Generator(rng, runner)
    for obj in _setup():
        scenario.commands.append(_apply_recording(runner, obj))
    for _ in range(steps):
        for obj in gen.propose():
            scenario.commands.append(_apply_recording(runner, obj))
    # drain the relay so the final state is quiescent
    scenario.commands.append(_apply_recording(runner, {"op": "advance_time", "ticks": 64}))
    for i, cmd in enumerate(scenario.commands, start=2):
        cmd.line = i
    report = build_report(scenario.name, seed, world, runner, runner.exit_status)
    return scenario, report


def dump_scenario(scenario: Scenario) -> str:
    header = {"scenario": scenario.name, "market_owner": scenario.market_owner}
    if scenario.main_chain:
        header["main_chain"] = scenario.main_chain
    lines = [json.dumps(header, sort_keys=True)]
    lines += [json.dumps(c.to_dict(), sort_keys=True) for c in scenario.commands]
    return "\n".join(lines) + "\n"

