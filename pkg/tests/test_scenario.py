import json

import pytest

from chainmarket import parse_scenario, run_scenario
from chainmarket.cli import main
from chainmarket.scenario import OPS, ParseError, run_commands

from .conftest import SCENARIOS

REQUIRED_OPS = {
    "create_chain", "credit", "register_participant", "register_seller_contract", "register_contract",
    "put_metadata", "mint_nft", "approve", "transfer_nft", "transfer_native", "transfer_fungible", "list_nft",
    "sell_nft", "buy_nft", "unlist_nft", "start_auction", "place_bid", "settle_auction", "rate_counterparty",
    "open_escrow", "confirm_payment", "confirm_delivery", "refund", "set_bridges", "lock_nft", "burn_wrapped",
    "peg_lock", "peg_burn", "advance_time", "inject_fault", "retry_transfer",
}


def test_every_operation_has_a_command():
    assert REQUIRED_OPS <= set(OPS)


def test_empty_scenario(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    report = run_scenario(path)
    assert (report.exit_status, report.events, report.failures) == (0, [], [])


def test_happy_path_report():
    report = run_scenario(SCENARIOS / "fixed_price_sale.jsonl")
    assert report.exit_status == 0
    native = report.balances["eth-main"]["native"]
    assert (native["S"], native["M"]) == (975, 25)
    assert sum(e["event"] == "NFTBought" for e in report.events) == 1


def test_expected_error_passes():
    text = (SCENARIOS / "negative" / "buy_wrong_value.jsonl").read_text()
    report, _ = run_commands(parse_scenario(text))
    assert report.exit_status == 0


@pytest.mark.parametrize("body,exit_code,kind", [
    ('{"op": "create_chain", "chain": "a"}\n{"op": "credit", "chain": "a", "to": "x", "amount": 5, "expect_error": "Overflow"}',
     1, "MissingError"),
    ('{"op": "credit", "chain": "a", "to": "x", "amount": 5}', 1, "CommandError"),
    ('{"op": "create_chain", "chain": "a"}\n{"op": "credit", "chain": "a", "to": "x", "amount": 5, "expect_error": "WrongValue"}'
     '\n{"op": "credit", "chain": "zz", "to": "x", "amount": 5, "expect_error": "WrongValue"}', 1, "WrongError"),
    ('{"op": "create_chain", "chain": "a"}\n{"op": "assert", "query": "native_balance", "chain": "a", "account": "x", "equals": 1}',
     1, "AssertionFailed"),
])
def test_failure_exit_codes(tmp_path, body, exit_code, kind):
    path = tmp_path / "s.jsonl"
    path.write_text(body + "\n")
    report = run_scenario(path)
    assert report.exit_status == exit_code
    assert report.failures[-1]["kind"] == kind


@pytest.mark.parametrize("body,line", [
    ('{"op": "teleport"}', 1),
    ('# comment\n{"op": "credit", "chain": "a"}', 2),
    ('{"op": "credit", "chain": "a", "to": "x", "amount": "5"}', 1),
    ('{"op": "credit", "chain": "a", "to": "x", "amount": 5, "colour": 1}', 1),
    ('not json', 1),
    ('[1, 2]', 1),
    ('{"op": "create_chain", "chain": "a", "expect_error": "NoSuchError"}', 1),
    ('{"op": "assert", "query": "clock"}', 1),
    ('{"op": "create_chain", "chain": "a"}\n{"scenario": "late"}', 2),
    ('{"scenario": "x", "relay": {"delays": {"a>b": 0}}}', 1),
])
def test_parse_errors(body, line):
    with pytest.raises(ParseError) as exc:
        parse_scenario(body)
    assert exc.value.line == line


def test_unbound_variable_is_parse_error(tmp_path):
    path = tmp_path / "s.jsonl"
    path.write_text('{"op": "create_chain", "chain": "$nope"}\n')
    assert run_scenario(path).exit_status == 3


def test_header_relay_config(tmp_path):
    body = [
        {"scenario": "relay", "relay": {"delays": {"eth-main>bsc": 4}, "fail": [1]}},
        {"op": "create_chain", "chain": "eth-main"},
        {"op": "create_chain", "chain": "bsc"},
        {"op": "set_bridges", "chain_a": "eth-main", "bridge_a": "e", "chain_b": "bsc", "bridge_b": "b"},
        {"op": "credit", "chain": "eth-main", "to": "x", "amount": 10},
        {"op": "peg_lock", "caller": "x", "amount": 10, "to_chain": "bsc", "bind": "t"},
        {"op": "assert", "query": "transfer", "transfer_id": "$t", "field": "delivery_tick", "equals": 4},
        {"op": "advance_time", "ticks": 4},
        {"op": "assert", "query": "transfer", "transfer_id": "$t", "field": "status", "equals": "Failed"},
    ]
    path = tmp_path / "relay.jsonl"
    path.write_text("\n".join(json.dumps(o) for o in body))
    report = run_scenario(path)
    assert report.scenario == "relay"
    assert report.exit_status == 0, report.failures


def _corrupting_scenario(tmp_path):
    # a successful command followed by a deliberate world corruption via an
    # injected operation, so invariant handling can be exercised end to end
    path = tmp_path / "bad.jsonl"
    path.write_text("\n".join(json.dumps(o) for o in [
        {"op": "create_chain", "chain": "a"},
        {"op": "corrupt"},
        {"op": "credit", "chain": "a", "to": "x", "amount": 1},
    ]))
    return path


@pytest.fixture
def corrupt_op(monkeypatch):
    from chainmarket.scenario import OpSpec

    def corrupt(w):
        w.ledger("a").balances["x"] = 5

    monkeypatch.setitem(OPS, "corrupt", OpSpec(corrupt, {}))


def test_invariant_violation_exit_2(tmp_path, corrupt_op):
    report = run_scenario(_corrupting_scenario(tmp_path))
    assert report.exit_status == 2
    assert report.steps == 3
    assert report.invariants["violations"][0]["invariant"] == "conservation"


def test_strict_mode_stops_early(tmp_path, corrupt_op):
    report = run_scenario(_corrupting_scenario(tmp_path), strict=True)
    assert (report.exit_status, report.steps) == (2, 2)


def test_failed_command_that_mutates_is_flagged(tmp_path, monkeypatch):
    from chainmarket import errors
    from chainmarket.scenario import OpSpec

    def sloppy(w):
        w.ledger("a").credit("x", 1)
        raise errors.InvalidArgument("too late")

    monkeypatch.setitem(OPS, "sloppy", OpSpec(sloppy, {}))
    path = tmp_path / "s.jsonl"
    path.write_text('{"op": "create_chain", "chain": "a"}\n{"op": "sloppy", "expect_error": "InvalidArgument"}\n')
    report = run_scenario(path)
    assert report.exit_status == 2
    assert report.invariants["violations"][0]["invariant"] == "atomicity"


def test_report_is_deterministic():
    a = run_scenario(SCENARIOS / "bridge_round_trip.jsonl", seed=3).to_json()
    b = run_scenario(SCENARIOS / "bridge_round_trip.jsonl", seed=3).to_json()
    assert a == b
    assert json.loads(a)["seed"] == 3


def test_golden_structured_report():
    golden = SCENARIOS / "golden" / "fixed_price_sale.json"
    assert run_scenario(SCENARIOS / "fixed_price_sale.jsonl").to_json() == golden.read_text()


def test_text_report_mentions_everything():
    text = run_scenario(SCENARIOS / "auction.jsonl").to_text()
    assert "exit status: 0" in text and "AuctionSettled" in text and "violations: 0" in text


# -- CLI --------------------------------------------------------------------

def test_cli_run_and_report_dir(tmp_path, capsys):
    code = main(["run", str(SCENARIOS / "peg.jsonl"), "--format", "structured", "--report-dir", str(tmp_path)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["scenario"] == "peg"
    assert (tmp_path / "peg.json").exists() and (tmp_path / "peg.txt").exists()


def test_cli_check(tmp_path, capsys):
    assert main(["check", str(SCENARIOS / "escrow.jsonl")]) == 0
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"op": "nope"}\n')
    assert main(["check", str(bad)]) == 3
    assert "line 1" in capsys.readouterr().err
    assert main(["check", str(tmp_path / "missing.jsonl")]) == 3


def test_cli_run_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"op": "credit"}\n')
    assert main(["run", str(bad), "--format", "structured"]) == 3
    assert json.loads(capsys.readouterr().out)["failures"][0]["kind"] == "ParseError"


def test_cli_fuzz_replays(tmp_path, capsys):
    out = tmp_path / "fz.jsonl"
    assert main(["fuzz", "--steps", "150", "--seed", "11", "--out", str(out), "--format", "structured"]) == 0
    first = json.loads(capsys.readouterr().out)
    assert main(["run", str(out), "--seed", "11", "--format", "structured"]) == 0
    replay = json.loads(capsys.readouterr().out)
    assert replay["events"] == first["events"]
    assert replay["balances"] == first["balances"]
