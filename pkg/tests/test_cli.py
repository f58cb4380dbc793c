import json
import subprocess
import sys

import pytest

from ccsim.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dao_exits_with_findings(capsys):
    code, out, _ = run(capsys, "run", "dao")
    rep = json.loads(out)
    assert code == 1 == rep["exit_code"]
    kinds = {f["kind"] for f in rep["findings"]}
    assert "ReentrancyInterference" in kinds


def test_cas_is_clean(capsys):
    code, out, _ = run(capsys, "run", "cas_incr")
    assert code == 0
    assert json.loads(out)["findings"] == []


def test_blockking_one_tx_per_block(capsys):
    code, out, _ = run(capsys, "run", "blockking", "--block-size", "1")
    rep = json.loads(out)
    assert code == 1
    assert rep["settings"]["block_size"] == 1
    kinds = {f["kind"] for f in rep["findings"]}
    assert {"TOD", "LostUpdate"} <= kinds
    assert any(f["witness"].get("key") == "warrior" for f in rep["findings"]
               if f["kind"] == "LostUpdate")


def test_fail_on_can_silence(capsys):
    code, _, _ = run(capsys, "run", "dao", "--fail-on", "TOD")
    assert code == 0


def test_transfer_only_dao_is_clean(capsys):
    code, out, _ = run(capsys, "run", "dao", "--send-mode", "transfer_only")
    assert code == 0


def test_detect_subset(capsys):
    code, out, _ = run(capsys, "run", "naive_incr", "--detect", "tod")
    rep = json.loads(out)
    assert list(rep["detectors"]) == ["tod"] and code == 1


def test_schema_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "x", "contracts": {"c": {"type": "Counter"}},
                               "clients": [{"id": 3}]}))
    code, _, err = run(capsys, "run", str(bad))
    assert code == 2 and "ccsim:" in err


def test_missing_file_exit_2(capsys):
    code, _, _ = run(capsys, "run", "/nonexistent/scenario.json")
    assert code == 2


def test_unknown_detector_exit_2(capsys):
    code, _, _ = run(capsys, "run", "cas_incr", "--detect", "astrology")
    assert code == 2


def write_history(tmp_path, doc):
    p = tmp_path / "h.json"
    p.write_text(json.dumps(doc))
    return str(p)


def test_lincheck_sequential(tmp_path, capsys):
    h = [{"client": "a", "op": "set", "args": [5], "invoke": 0, "response": 1, "ret": 0},
         {"client": "b", "op": "get", "invoke": 2, "response": 3, "ret": 5}]
    code, out, _ = run(capsys, "lincheck", write_history(tmp_path, h), "counter-spec")
    assert code == 0
    assert out.splitlines()[0] == "Linearizable"
    assert "a:set -> b:get" in out


def test_lincheck_stale(tmp_path, capsys):
    h = {"initial": 0, "ops": [
        {"client": "a", "op": "get", "invoke": 0, "response": 1, "ret": 5},
        {"client": "b", "op": "set", "args": [5], "invoke": 2, "response": 3, "ret": 0}]}
    code, out, _ = run(capsys, "lincheck", write_history(tmp_path, h))
    assert code == 1 and out.startswith("NonLinearizable")


def test_lincheck_empty(tmp_path, capsys):
    code, out, _ = run(capsys, "lincheck", write_history(tmp_path, []))
    assert code == 0 and "empty history" in out


def test_lincheck_over_bound(tmp_path, capsys):
    h = [{"client": "a", "op": "get", "invoke": 2 * i, "response": 2 * i + 1, "ret": 0}
         for i in range(11)]
    code, out, _ = run(capsys, "lincheck", write_history(tmp_path, h))
    assert code == 3 and out.startswith("Unknown")


def test_lincheck_bad_input(tmp_path, capsys):
    p = tmp_path / "h.json"
    p.write_text("{not json")
    code, _, _ = run(capsys, "lincheck", str(p))
    assert code == 2


def test_list_contracts_stable(capsys):
    _, first, _ = run(capsys, "list-contracts")
    _, second, _ = run(capsys, "list-contracts")
    assert first == second
    for name in ("Counter", "CASCounter", "OwnedCounter", "RWLockCounter", "DAO", "FixedDAO",
                 "BlockKing", "naive-incr", "cas-retry-incr"):
        assert name in first
    assert "Fig. 1" in first


def test_random_mode_same_seed_same_bytes(capsys):
    args = ("run", "naive_incr", "--explore", "random", "--runs", "20")
    _, a, _ = run(capsys, *args, "--seed", "7")
    _, b, _ = run(capsys, *args, "--seed", "7")
    assert a == b
    assert json.loads(a)["exploration"]["seed"] == 7


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CCSIM_SEED", "11")
    _, out, _ = run(capsys, "run", "cas_incr", "--explore", "random", "--runs", "3")
    assert json.loads(out)["exploration"]["seed"] == 11


def test_dump_traces_jsonl(tmp_path, capsys):
    path = tmp_path / "t.jsonl"
    run(capsys, "run", "dao", "--dump-traces", str(path))
    rows = [json.loads(line) for line in path.read_text().splitlines()]
    assert rows and {"schedule", "tx", "kind", "seq"} <= set(rows[0])
    sends = [r for r in rows if r["kind"] == "SendAttempt"]
    assert len(sends) == 5


def test_text_format_and_out_file(tmp_path, capsys):
    out = tmp_path / "rep.txt"
    code, stdout, _ = run(capsys, "run", "rwlock_starve", "--format", "text", "--out", str(out))
    text = out.read_text()
    assert stdout == ""
    assert "liveness" in text and "Never" in text
    assert text.rstrip().endswith(f"exit code: {code}")


def test_truncation_is_reported(capsys):
    _, out, _ = run(capsys, "run", "cas_incr3", "--max-schedules", "5")
    rep = json.loads(out)
    assert rep["exploration"]["truncated"] and rep["exploration"]["schedules"] == 5


@pytest.mark.parametrize("argv", [["list-contracts"], ["run", "cas_incr", "--format", "text"]])
def test_module_entry_point(argv):
    proc = subprocess.run([sys.executable, "-m", "ccsim", *argv], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout
