"""Scenario files: parsing, execution and run reports.

A scenario is a JSON-lines file.  Blank lines and lines starting with ``#``
are ignored.  The first object may be a header (it has a ``"scenario"`` key
and no ``"op"``)::

    {"scenario": "happy-path", "market_owner": "M", "main_chain": "eth-main",
     "relay": {"delays": {"eth-main>bsc": 3}, "fail": [2]}}

Every other line is one command, e.g.::

    {"op": "credit", "chain": "eth-main", "to": "B", "amount": 1000}
    {"op": "buy_nft", "caller": "B", "listing_id": 1, "payment": 999, "expect_error": "WrongValue"}
    {"op": "mint_nft", ..., "bind": "tok"}          # later: "token_id": "$tok"
    {"op": "assert", "query": "native_balance", "chain": "eth-main", "account": "S", "equals": 975}

``expect_error`` turns a command into a negative test: it passes only if the
named error is raised, and the world must be left untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Union

from . import errors
from .invariants import Violation, check_invariants
from .metadata_store import encode_metadata
from .world import DEFAULT_MARKET_OWNER, WorldState

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVARIANT = 2
EXIT_PARSE = 3

META_KEYS = {"op", "expect_error", "bind", "note"}


class ParseError(Exception):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class InvariantViolation(Exception):
    def __init__(self, step: int, violation: Violation) -> None:
        super().__init__(f"step {step}: {violation.invariant}: {violation.detail}")
        self.step = step
        self.violation = violation


class CommandError(Exception):
    def __init__(self, step: int, error: errors.SimError) -> None:
        super().__init__(f"step {step}: {error.code}: {error}")
        self.step = step
        self.error = error


# -- argument types ----------------------------------------------------------

def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


TYPES: dict[str, Callable[[Any], bool]] = {
    "str": lambda v: isinstance(v, str),
    "int": _is_int,
    "bool": lambda v: isinstance(v, bool),
    "contract": lambda v: isinstance(v, str) and "/" in v
    or isinstance(v, list) and len(v) == 2 and all(isinstance(x, str) for x in v),
    "strs": lambda v: isinstance(v, list) and all(isinstance(x, str) for x in v),
    "ints": lambda v: isinstance(v, list) and all(_is_int(x) for x in v),
    "any": lambda v: True,
}


@dataclass(frozen=True)
class OpSpec:
    fn: Callable[..., Any]
    required: dict[str, str]
    optional: dict[str, str] = field(default_factory=dict)


def _put_metadata(w: WorldState, data=None, text=None):
    if (data is None) == (text is None):
        raise errors.InvalidArgument("put_metadata takes exactly one of data/text")
    return w.put_metadata(encode_metadata(text if text is not None else data))


def _inject_fault(w: WorldState, fail=None, from_chain=None, to_chain=None, ticks=None):
    if ticks is not None or from_chain is not None or to_chain is not None:
        if None in (from_chain, to_chain, ticks):
            raise errors.InvalidArgument("a delay needs from_chain, to_chain and ticks")
        w.bridge.set_delay(from_chain, to_chain, ticks)
    if fail:
        w.bridge.inject_fault(fail)


def _void(_):
    return None


def _id(x):
    return None if x is None else x.id


OPS: dict[str, OpSpec] = {
    "create_chain": OpSpec(lambda w, chain: _void(w.create_chain(chain)), {"chain": "str"}),
    "credit": OpSpec(lambda w, chain, to, amount: w.credit(chain, to, amount),
                     {"chain": "str", "to": "str", "amount": "int"}),
    "transfer_native": OpSpec(lambda w, chain, amount, to, **kw: w.transfer_native(chain, kw["from"], to, amount),
                              {"chain": "str", "from": "str", "to": "str", "amount": "int"}),
    "register_participant": OpSpec(
        lambda w, address, roles, kyc: _void(w.market.register_participant(address, roles, kyc)),
        {"address": "str", "roles": "strs", "kyc": "bool"}),
    "register_contract": OpSpec(lambda w, chain, address: str(w.tokens.register_contract(chain, address)),
                                {"chain": "str", "address": "str"}),
    "register_seller_contract": OpSpec(lambda w, seller, contract: w.market.register_seller_contract(seller, contract),
                                       {"seller": "str", "contract": "contract"}),
    "put_metadata": OpSpec(_put_metadata, {}, {"data": "any", "text": "str"}),
    "mint_nft": OpSpec(
        lambda w, contract, caller, uri, metadata_hash, mint_price=0:
            w.tokens.mint_nft(contract, caller, uri, metadata_hash, mint_price),
        {"contract": "contract", "caller": "str", "uri": "str", "metadata_hash": "str"},
        {"mint_price": "int"}),
    "approve": OpSpec(lambda w, contract, caller, token_id, operator: w.tokens.approve(contract, caller, token_id, operator),
                      {"contract": "contract", "caller": "str", "token_id": "int", "operator": "str"}),
    "transfer_nft": OpSpec(lambda w, contract, caller, token_id, to: w.tokens.transfer_nft(contract, caller, token_id, to),
                           {"contract": "contract", "caller": "str", "token_id": "int", "to": "str"}),
    "transfer_fungible": OpSpec(lambda w, chain, caller, to, amount: w.tokens.transfer_fungible(chain, caller, to, amount),
                                {"chain": "str", "caller": "str", "to": "str", "amount": "int"}),
    "list_nft": OpSpec(lambda w, caller, contract, token_id, price, chain:
                       w.market.list_nft(caller, contract, token_id, price, chain).id,
                       {"caller": "str", "contract": "contract", "token_id": "int", "price": "int", "chain": "str"}),
    "sell_nft": OpSpec(lambda w, caller, contract, token_id, price: w.market.sell_nft(caller, contract, token_id, price).id,
                       {"caller": "str", "contract": "contract", "token_id": "int", "price": "int"}),
    "buy_nft": OpSpec(lambda w, caller, listing_id, payment: w.market.buy_nft(caller, listing_id, payment).id,
                      {"caller": "str", "listing_id": "int", "payment": "int"}),
    "buy_order": OpSpec(lambda w, caller, order_id, payment: w.market.buy_order(caller, order_id, payment).id,
                        {"caller": "str", "order_id": "int", "payment": "int"}),
    "cancel_order": OpSpec(lambda w, caller, order_id: w.market.cancel_order(caller, order_id),
                           {"caller": "str", "order_id": "int"}),
    "unlist_nft": OpSpec(lambda w, caller, listing_id: w.market.unlist_nft(caller, listing_id),
                         {"caller": "str", "listing_id": "int"}),
    "start_auction": OpSpec(
        lambda w, caller, contract, token_id, duration, start_price=None:
            w.market.start_auction(caller, contract, token_id, start_price, duration).id,
        {"caller": "str", "contract": "contract", "token_id": "int", "duration": "int"},
        {"start_price": "int"}),
    "place_bid": OpSpec(lambda w, caller, auction_id, amount: w.market.place_bid(caller, auction_id, amount),
                        {"caller": "str", "auction_id": "int", "amount": "int"}),
    "settle_auction": OpSpec(lambda w, auction_id: _id(w.market.settle_auction(auction_id)), {"auction_id": "int"}),
    "rate_counterparty": OpSpec(lambda w, caller, sale_id, target, score:
                                w.market.rate_counterparty(caller, sale_id, target, score),
                                {"caller": "str", "sale_id": "int", "target": "str", "score": "int"}),
    "open_escrow": OpSpec(lambda w, chain, buyer, seller, arbitrator, amount:
                          w.escrow.open_escrow(chain, buyer, seller, arbitrator, amount).id,
                          {"chain": "str", "buyer": "str", "seller": "str", "arbitrator": "str", "amount": "int"}),
    "confirm_payment": OpSpec(lambda w, escrow_id, caller, value: w.escrow.confirm_payment(escrow_id, caller, value),
                              {"escrow_id": "int", "caller": "str", "value": "int"}),
    "confirm_delivery": OpSpec(lambda w, escrow_id, caller: w.escrow.confirm_delivery(escrow_id, caller),
                               {"escrow_id": "int", "caller": "str"}),
    "refund": OpSpec(lambda w, escrow_id, caller: w.escrow.refund(escrow_id, caller),
                     {"escrow_id": "int", "caller": "str"}),
    "set_bridges": OpSpec(lambda w, chain_a, bridge_a, chain_b, bridge_b:
                          _void(w.bridge.set_bridges(chain_a, bridge_a, chain_b, bridge_b)),
                          {"chain_a": "str", "bridge_a": "str", "chain_b": "str", "bridge_b": "str"}),
    "lock_nft": OpSpec(lambda w, caller, contract, token_id, to_chain: w.bridge.lock_nft(caller, contract, token_id, to_chain).id,
                       {"caller": "str", "contract": "contract", "token_id": "int", "to_chain": "str"}),
    "burn_wrapped": OpSpec(lambda w, caller, contract, token_id: w.bridge.burn_wrapped(caller, contract, token_id).id,
                           {"caller": "str", "contract": "contract", "token_id": "int"}),
    "unlock_nft": OpSpec(lambda w, caller, contract, token_id, beneficiary:
                         _void(w.bridge.unlock_nft(caller, contract, token_id, beneficiary)),
                         {"caller": "str", "contract": "contract", "token_id": "int", "beneficiary": "str"}),
    "peg_lock": OpSpec(lambda w, caller, amount, to_chain: w.bridge.peg_lock(caller, amount, to_chain).id,
                       {"caller": "str", "amount": "int", "to_chain": "str"}),
    "peg_burn": OpSpec(lambda w, caller, amount, chain: w.bridge.peg_burn(caller, amount, chain).id,
                       {"caller": "str", "amount": "int", "chain": "str"}),
    "advance_time": OpSpec(lambda w, ticks: _void(w.advance_time(ticks)), {"ticks": "int"}),
    "inject_fault": OpSpec(_inject_fault, {},
                           {"fail": "ints", "from_chain": "str", "to_chain": "str", "ticks": "int"}),
    "retry_transfer": OpSpec(lambda w, transfer_id: _void(w.bridge.retry_transfer(transfer_id)),
                             {"transfer_id": "int"}),
}


# -- queries for "assert" ----------------------------------------------------

def _field(obj_dict: dict, name: Optional[str]):
    return obj_dict if name is None else obj_dict[name]


def _verify_metadata(w: WorldState, contract, token_id):
    rec = w.tokens.record(contract, token_id)
    return w.store.verify(rec.metadata_hash)


QUERIES: dict[str, OpSpec] = {
    "native_balance": OpSpec(lambda w, chain, account: w.balance(chain, account), {"chain": "str", "account": "str"}),
    "native_supply": OpSpec(lambda w, chain: w.ledger(chain).supply, {"chain": "str"}),
    "fungible_balance": OpSpec(lambda w, chain, account: w.tokens.balance_of(chain, account),
                               {"chain": "str", "account": "str"}),
    "fungible_supply": OpSpec(lambda w, chain: w.tokens.fungible_ledger(chain).supply, {"chain": "str"}),
    "owner_of": OpSpec(lambda w, contract, token_id: w.tokens.owner_of(contract, token_id),
                       {"contract": "contract", "token_id": "int"}),
    "token": OpSpec(lambda w, contract, token_id, field=None: _field(w.tokens.record(contract, token_id).to_dict(), field),
                    {"contract": "contract", "token_id": "int"}, {"field": "str"}),
    "verify_metadata": OpSpec(_verify_metadata, {"contract": "contract", "token_id": "int"}),
    "escrow": OpSpec(lambda w, escrow_id, field=None: _field(w.escrow.get(escrow_id).to_dict(), field),
                     {"escrow_id": "int"}, {"field": "str"}),
    "listing": OpSpec(lambda w, listing_id, field=None: _field(w.market.listing(listing_id).to_dict(), field),
                      {"listing_id": "int"}, {"field": "str"}),
    "order": OpSpec(lambda w, order_id, field=None: _field(w.market.order(order_id).to_dict(), field),
                    {"order_id": "int"}, {"field": "str"}),
    "auction": OpSpec(lambda w, auction_id, field=None: _field(w.market.auction(auction_id).to_dict(), field),
                      {"auction_id": "int"}, {"field": "str"}),
    "transfer": OpSpec(lambda w, transfer_id, field=None: _field(w.bridge.transfer(transfer_id).to_dict(), field),
                       {"transfer_id": "int"}, {"field": "str"}),
    "listing_count": OpSpec(lambda w: w.market.listing_count, {}),
    "clock": OpSpec(lambda w: w.clock.tick, {}),
    "peg_locked": OpSpec(lambda w, chain: w.bridge.peg(chain).main_chain_locked, {"chain": "str"}),
    "event_count": OpSpec(lambda w, event: len(w.events.named(event)), {"event": "str"}),
    "ratings": OpSpec(lambda w, address: w.market.participants[address].to_dict()["ratings"]
                      if address in w.market.participants else [], {"address": "str"}),
    "violations": OpSpec(lambda w: len(check_invariants(w)), {}),
}


# -- parsing ----------------------------------------------------------------

@dataclass
class Command:
    line: int
    op: str
    args: dict[str, Any]
    expect_error: Optional[str] = None
    bind: Optional[str] = None
    query: Optional[str] = None
    equals: Any = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"op": self.op}
        if self.query is not None:
            d["query"] = self.query
        d.update(self.args)
        if self.op == "assert":
            d["equals"] = self.equals
        if self.expect_error is not None:
            d["expect_error"] = self.expect_error
        if self.bind is not None:
            d["bind"] = self.bind
        return d


@dataclass
class Scenario:
    name: str
    commands: list[Command]
    market_owner: str = DEFAULT_MARKET_OWNER
    main_chain: Optional[str] = None
    delays: dict[str, int] = field(default_factory=dict)
    fail: list[int] = field(default_factory=list)


def _check_args(spec: OpSpec, args: dict[str, Any], line: int, what: str) -> None:
    missing = sorted(set(spec.required) - set(args))
    if missing:
        raise ParseError(line, f"{what} is missing {', '.join(missing)}")
    allowed = {**spec.required, **spec.optional}
    for key, value in args.items():
        if key not in allowed:
            raise ParseError(line, f"{what} does not take {key!r}")
        if isinstance(value, str) and value.startswith("$"):
            continue
        if not TYPES[allowed[key]](value):
            raise ParseError(line, f"{what}.{key} must be {allowed[key]}, got {value!r}")


def parse_command(obj: Any, line: int) -> Command:
    if not isinstance(obj, dict):
        raise ParseError(line, "each line must be a JSON object")
    op = obj.get("op")
    if not isinstance(op, str):
        raise ParseError(line, "missing 'op'")
    expect = obj.get("expect_error")
    if expect is not None and expect not in errors.error_names():
        raise ParseError(line, f"unknown error name {expect!r}")
    bind = obj.get("bind")
    if bind is not None and (not isinstance(bind, str) or not bind.isidentifier()):
        raise ParseError(line, f"bad bind name {bind!r}")
    args = {k: v for k, v in obj.items() if k not in META_KEYS}

    if op == "assert":
        query = args.pop("query", None)
        if query not in QUERIES:
            raise ParseError(line, f"unknown assert query {query!r}")
        has_equals = "equals" in args
        equals = args.pop("equals", None)
        if not has_equals and expect is None:
            raise ParseError(line, "assert needs 'equals' or 'expect_error'")
        _check_args(QUERIES[query], args, line, f"assert {query}")
        return Command(line, op, args, expect, bind, query, equals)

    spec = OPS.get(op)
    if spec is None:
        raise ParseError(line, f"unknown command {op!r}")
    _check_args(spec, args, line, op)
    return Command(line, op, args, expect, bind)


def _parse_header(obj: dict, line: int) -> dict:
    allowed = {"scenario", "market_owner", "main_chain", "relay", "note"}
    extra = set(obj) - allowed
    if extra:
        raise ParseError(line, f"unknown header keys {sorted(extra)}")
    if not isinstance(obj["scenario"], str):
        raise ParseError(line, "scenario name must be a string")
    relay = obj.get("relay", {})
    if not isinstance(relay, dict) or set(relay) - {"delays", "fail"}:
        raise ParseError(line, "relay must be {delays, fail}")
    delays = relay.get("delays", {})
    if not isinstance(delays, dict) or not all(
        isinstance(k, str) and k.count(">") == 1 and _is_int(v) and v >= 1 for k, v in delays.items()
    ):
        raise ParseError(line, "relay.delays maps 'from>to' to positive ints")
    fail = relay.get("fail", [])
    if not TYPES["ints"](fail):
        raise ParseError(line, "relay.fail must be a list of transfer ids")
    for key in ("market_owner", "main_chain"):
        if key in obj and not isinstance(obj[key], str):
            raise ParseError(line, f"{key} must be a string")
    return {
        "name": obj["scenario"],
        "market_owner": obj.get("market_owner", DEFAULT_MARKET_OWNER),
        "main_chain": obj.get("main_chain"),
        "delays": dict(delays),
        "fail": list(fail),
    }


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    header: dict[str, Any] = {"name": name}
    commands: list[Command] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(lineno, f"invalid JSON: {exc.msg}") from None
        if isinstance(obj, dict) and "scenario" in obj and "op" not in obj:
            if commands or len(header) > 1:
                raise ParseError(lineno, "header must come first")
            header = _parse_header(obj, lineno)
            continue
        commands.append(parse_command(obj, lineno))
    return Scenario(commands=commands, **header)


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), name=path.stem)


# -- execution ---------------------------------------------------------------

@dataclass
class RunReport:
    scenario: str
    seed: int
    final_clock: int
    balances: dict
    nfts: list
    events: list
    invariants: dict
    failures: list
    exit_status: int
    steps: int = 0

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "exit_status": self.exit_status,
            "steps": self.steps,
            "final_clock": self.final_clock,
            "balances": self.balances,
            "nfts": self.nfts,
            "invariants": self.invariants,
            "failures": self.failures,
            "events": self.events,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [
            f"scenario: {self.scenario}",
            f"seed: {self.seed}",
            f"exit status: {self.exit_status}",
            f"steps: {self.steps}",
            f"final clock: {self.final_clock}",
            "",
            "balances:",
        ]
        for chain, tables in self.balances.items():
            lines.append(f"  {chain}")
            for kind in ("native", "fungible"):
                for acct, amt in tables[kind].items():
                    lines.append(f"    {kind:<9} {acct:<24} {amt}")
        lines += ["", "nfts:"]
        for n in self.nfts:
            lines.append(f"  {n['contract']}#{n['token_id']:<4} {n['status']:<13} owner={n['owner']}  hash={n['metadata_hash']}")
        lines += ["", f"invariant checks: {self.invariants['checks']}, violations: {len(self.invariants['violations'])}"]
        for v in self.invariants["violations"]:
            lines.append(f"  step {v['step']}: {v['invariant']}: {v['detail']}")
        lines += ["", f"failures: {len(self.failures)}"]
        for f in self.failures:
            lines.append(f"  line {f['line']} ({f['op']}): {f['kind']}: {f['detail']}")
        lines += ["", f"events: {len(self.events)}"]
        for e in self.events:
            rest = " ".join(f"{k}={json.dumps(v, sort_keys=True)}" for k, v in e.items() if k not in ("seq", "tick", "event"))
            lines.append(f"  {e['seq']:>5} t={e['tick']:<4} {e['event']} {rest}")
        return "\n".join(lines) + "\n"


def _resolve(value: Any, env: dict[str, Any], line: int) -> Any:
    if isinstance(value, str) and value.startswith("$"):
        name = value[1:]
        if name not in env:
            raise ParseError(line, f"unbound variable {value}")
        return env[name]
    return value


class Runner:
    """Applies commands to a world, checking invariants after every step."""

    def __init__(self, world: WorldState, strict: bool = False, check_atomicity: bool = True) -> None:
        self.world = world
        self.strict = strict
        self.check_atomicity = check_atomicity
        self.env: dict[str, Any] = {}
        self.failures: list[dict] = []
        self.violations: list[dict] = []
        self.checks = 0
        self.steps = 0
        self.parse_error: Optional[ParseError] = None

    def _call(self, cmd: Command) -> Any:
        args = {k: _resolve(v, self.env, cmd.line) for k, v in cmd.args.items()}
        if cmd.op == "assert":
            return QUERIES[cmd.query].fn(self.world, **args)
        return OPS[cmd.op].fn(self.world, **args)

    def _fail(self, cmd: Command, kind: str, detail: str) -> None:
        self.failures.append({"step": self.steps, "line": cmd.line, "op": cmd.op, "kind": kind, "detail": detail})

    def step(self, cmd: Command) -> bool:
        """Apply one command.  Returns False when the run should stop."""
        self.steps += 1
        before = self.world.snapshot() if self.check_atomicity else None
        error: Optional[errors.SimError] = None
        result = expected = None
        try:
            if cmd.op == "assert":
                expected = _resolve(cmd.equals, self.env, cmd.line)
            result = self._call(cmd)
        except errors.SimError as exc:
            error = exc
        except ParseError as exc:
            self.parse_error = exc
            return False

        if error is not None:
            if before is not None and self.world.snapshot() != before:
                self._violate(Violation("atomicity", f"{cmd.op} raised {error.code} after mutating state"))
            if cmd.expect_error is None:
                self._fail(cmd, "CommandError", f"{error.code}: {error}")
            elif error.code != cmd.expect_error:
                self._fail(cmd, "WrongError", f"expected {cmd.expect_error}, got {error.code}: {error}")
        elif cmd.expect_error is not None:
            self._fail(cmd, "MissingError", f"expected {cmd.expect_error}, command succeeded")
        elif cmd.op == "assert" and result != expected:
            self._fail(cmd, "AssertionFailed", f"{cmd.query} = {result!r}, expected {cmd.equals!r}")
        if error is None and cmd.bind is not None:
            self.env[cmd.bind] = result

        self.checks += 1
        for v in check_invariants(self.world):
            self._violate(v)
        return not (self.strict and self.violations)

    def _violate(self, v: Violation) -> None:
        self.violations.append({"step": self.steps, **v.to_dict()})

    @property
    def exit_status(self) -> int:
        if self.parse_error is not None:
            return EXIT_PARSE
        if self.violations:
            return EXIT_INVARIANT
        if self.failures:
            return EXIT_FAILURE
        return EXIT_OK


def world_for(scenario: Scenario) -> WorldState:
    world = WorldState(market_owner=scenario.market_owner, main_chain=scenario.main_chain)
    for key, ticks in sorted(scenario.delays.items()):
        a, _, b = key.partition(">")
        world.bridge.delays[(a, b)] = ticks
    world.bridge.fail_ids.update(scenario.fail)
    return world


def build_report(name: str, seed: int, world: WorldState, runner: Optional[Runner], exit_status: int,
                 parse_error: Optional[ParseError] = None) -> RunReport:
    snap = world.snapshot()
    failures = [] if runner is None else list(runner.failures)
    if parse_error is not None:
        failures.append({"step": 0 if runner is None else runner.steps, "line": parse_error.line,
                         "op": None, "kind": "ParseError", "detail": parse_error.reason})
    return RunReport(
        scenario=name,
        seed=seed,
        final_clock=world.clock.tick,
        balances={c: {"native": t["native"], "fungible": t["fungible"]} for c, t in snap["chains"].items()},
        nfts=[{k: n[k] for k in ("contract", "token_id", "owner", "status", "metadata_hash", "origin")}
              for n in snap["nfts"]],
        events=[e.to_dict() for e in world.events],
        invariants={
            "checks": 0 if runner is None else runner.checks,
            "violations": [] if runner is None else runner.violations,
        },
        failures=failures,
        exit_status=exit_status,
        steps=0 if runner is None else runner.steps,
    )


def run_commands(scenario: Scenario, seed: int = 0, strict: bool = False) -> tuple[RunReport, WorldState]:
    world = world_for(scenario)
    runner = Runner(world, strict=strict)
    for cmd in scenario.commands:
        if not runner.step(cmd):
            break
    report = build_report(scenario.name, seed, world, runner, runner.exit_status, runner.parse_error)
    return report, world


def run_scenario(path: Union[str, Path], seed: int = 0, strict: bool = False) -> RunReport:
    path = Path(path)
    try:
        scenario = load_scenario(path)
    except ParseError as exc:
        return build_report(path.stem, seed, WorldState(), None, EXIT_PARSE, exc)
    return run_commands(scenario, seed=seed, strict=strict)[0]
