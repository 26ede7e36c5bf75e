import json

import pytest
from hypothesis import given, settings, strategies as st

from dvfourfold import cli, harness, jsonio
from dvfourfold.exactfield import QQ
from dvfourfold.harness import ScenarioConfig, gen_instance, run_suite
from dvfourfold.trivector import is_zero_on, vanishing_kernel

from conftest import F10007


@pytest.mark.parametrize("kind,dims", [("single", [6]), ("pair", [6, 6]), ("triangle", [6, 6, 6]),
                                       ("stratum4", [6, 6]), ("stratum5", [6, 6])])
def test_generator_contract(kind, dims):
    inst, subs = gen_instance(ScenarioConfig(kind, seed=5))
    assert [s.dim for s in subs] == dims
    assert all(is_zero_on(inst.alpha, s) for s in subs)
    assert inst.provenance == {"seed": 5, "config": kind}


@pytest.mark.parametrize("kind", ["single", "pair", "triangle"])
def test_kernel_dimensions(kind):
    rng = harness.make_rng(1)
    subs = harness.draw_configuration(kind, F10007, rng)
    assert vanishing_kernel(subs, 10, F10007).nrows == harness.EXPECTED_KERNEL_DIM[kind]


def test_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig("quad")
    with pytest.raises(ValueError):
        ScenarioConfig("pair", trials=0)
    with pytest.raises(ValueError):
        ScenarioConfig("pair", seed=-1)


@settings(max_examples=5)
@given(st.sampled_from(sorted(harness.SUITES)), st.integers(0, 2**64 - 1))
def test_counter_identity(suite, seed):
    rep = run_suite(suite, ScenarioConfig("pair", seed=seed, trials=1, samples=5))
    for c in rep.checks.values():
        assert c["passed"] + c["rejected"] + c["failed"] == c["attempted"]
    assert rep.ok


def test_reports_byte_identical():
    cfg = ScenarioConfig("pair", seed=42, trials=3, samples=5)
    a = jsonio.dumps(run_suite("triangle", cfg).to_dict())
    b = jsonio.dumps(run_suite("triangle", cfg).to_dict())
    assert a == b


def test_parallel_matches_serial():
    cfg = ScenarioConfig("pair", seed=42, trials=4, samples=5)
    serial = run_suite("boundary", cfg, jobs=1).to_dict()
    parallel = run_suite("boundary", cfg, jobs=2).to_dict()
    assert jsonio.dumps(serial) == jsonio.dumps(parallel)


def test_triangle_suite_over_rationals():
    rep = run_suite("triangle", ScenarioConfig("pair", field=QQ, seed=4, trials=3))
    assert rep.ok and rep.counts("completion")["passed"] == 3


def test_json_round_trip():
    inst, subs = gen_instance(ScenarioConfig("triangle", seed=8))
    d = json.loads(jsonio.dumps(jsonio.scenario_file(inst, subs, "triangle")))
    inst2, subs2 = jsonio.load_scenario(d)
    assert inst2.alpha == inst.alpha and subs2 == subs


def test_witness_summary():
    s = harness.pairing_summary(harness.witness_components(QQ))
    assert s["det"] == "-2" and s["nondegenerate"]
    assert s["reduction_criterion_q3"] and s["reduction_criterion_q1"]


# --- CLI ----------------------------------------------------------------------

def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_pairing_witness_file(tmp_path, capsys):
    path = tmp_path / "witness.json"
    path.write_text(json.dumps(harness.WITNESS_BLOCKS))
    code, out, _ = run_cli(["pairing", "--in", str(path)], capsys)
    assert code == 0 and json.loads(out)["det"] == "-2"


def test_cli_gen_complete_verify(tmp_path, capsys):
    pair, rec = tmp_path / "pair.json", tmp_path / "tri.json"
    assert run_cli(["gen", "--kind", "pair", "--seed", "3", "--out", str(pair)], capsys)[0] == 0
    assert run_cli(["complete", "--in", str(pair), "--out", str(rec)], capsys)[0] == 0
    record = json.loads(rec.read_text())
    assert set(record) == {"instance", "W1", "W2", "W3", "systems", "checks"}
    code, out, _ = run_cli(["verify", "--in", str(rec)], capsys)
    assert code == 0 and json.loads(out)["ok"]


def test_cli_verify_detects_tampering(tmp_path, capsys):
    pair = tmp_path / "pair.json"
    run_cli(["gen", "--seed", "3", "--out", str(pair)], capsys)
    d = json.loads(pair.read_text())
    # shift one coefficient; the seeded spaces lie in general position so W1 notices
    coeffs = d["instance"]["alpha"]["coeffs"]
    old = next((int(c[3]) for c in coeffs if c[:3] == [0, 1, 2]), 0)
    coeffs[:] = [c for c in coeffs if c[:3] != [0, 1, 2]] + [[0, 1, 2, str((old + 1) % 10007)]]
    pair.write_text(json.dumps(d))
    code, out, _ = run_cli(["verify", "--in", str(pair)], capsys)
    assert code == 1 and not json.loads(out)["ok"]


def test_cli_complete_wrong_stratum(tmp_path, capsys):
    s4 = tmp_path / "s4.json"
    run_cli(["gen", "--kind", "stratum4", "--out", str(s4)], capsys)
    code, _, err = run_cli(["complete", "--in", str(s4)], capsys)
    assert code == 1 and "WrongStratum" in err


@pytest.mark.parametrize("argv", [["suite", "--bogus"], ["gen", "--field", "gf:10"], ["gen", "--seed", "-1"],
                                  ["complete"], ["complete", "--in", "/nonexistent.json"], []])
def test_cli_usage_errors(argv, capsys):
    assert run_cli(argv, capsys)[0] == 2


def test_cli_suite_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["suite", "--only", "ledger", "pairing", "--trials", "2", "--seed", "42"]
    assert run_cli(args + ["--out", str(a)], capsys)[0] == 0
    assert run_cli(args + ["--out", str(b), "--jobs", "2"], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_chain_and_boundary(capsys):
    code, out, _ = run_cli(["chain", "--trials", "1", "--samples", "10"], capsys)
    assert code == 0 and json.loads(out)["suite"] == "chain"
    code, out, _ = run_cli(["boundary", "--trials", "1"], capsys)
    assert code == 0 and json.loads(out)["ok"]
