import json

import pytest

from weakseq.cli import main
from weakseq.reports import load_report, loads_sequence


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_gauss_passes(capsys):
    code, out, _ = run(capsys, "verify", "gauss", "--primes", "5..13")
    assert code == 0
    env = json.loads(out)
    assert env["payload"]["data"]["pass"] is True
    assert env["config"]["primes"] == "5..13"


def test_verify_weil_zero_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "weil", "--m", "2", "--primes", "5..101", "--tol", "0")
    assert code == 1
    assert json.loads(out)["payload"]["data"]["pass"] is False


def test_gen_rejects_composite_p0(capsys):
    code, _, err = run(capsys, "gen", "--kind", "power", "--m", "2", "--p0", "4")
    assert code == 2 and "prime" in err


def test_unknown_flag_is_usage_error(capsys):
    assert run(capsys, "gen", "--frobnicate")[0] == 2
    assert run(capsys, "verify")[0] == 2


def test_bad_worker_env(capsys, monkeypatch):
    monkeypatch.setenv("WEAKSEQ_WORKERS", "many")
    assert run(capsys, "verify", "gauss", "--primes", "5")[0] == 2


def test_gen_writes_loadable_sequence(tmp_path, capsys):
    path = tmp_path / "seq.json"
    assert run(capsys, "gen", "--count", "4", "--out", str(path))[0] == 0
    seq = loads_sequence(path.read_text())
    assert seq.schedule.primes == (5, 11, 23, 47)
    code, out, _ = run(capsys, "probe", "--sequence", str(path), "--family", "deltas", "--trials", "2")
    assert code == 0


def test_outputs_are_byte_identical(tmp_path, capsys):
    paths = []
    out, csv = tmp_path / "r.json", tmp_path / "r.csv"
    for _ in range(2):
        assert run(capsys, "--seed", "3", "maximal", "--count", "4", "--out", str(out), "--csv", str(csv))[0] == 0
        paths.append((out.read_bytes(), csv.read_bytes()))
    assert paths[0] == paths[1]


def test_worker_count_does_not_change_results(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "--workers", "1", "verify", "weil", "--primes", "5..31", "--out", str(a))
    run(capsys, "--workers", "4", "verify", "weil", "--primes", "5..31", "--out", str(b))
    pa, pb = json.loads(a.read_text()), json.loads(b.read_text())
    assert pa["payload"] == pb["payload"]


def test_verify_fourier_and_transfer(capsys):
    assert run(capsys, "verify", "fourier", "--p", "5", "--m", "2", "--trials", "5")[0] == 0
    assert run(capsys, "verify", "transfer", "--p", "5")[0] == 0


def test_scan_decay_csv(tmp_path, capsys):
    csv = tmp_path / "d.csv"
    # small primes only; the default slope window is not expected to hold here
    code, _, _ = run(capsys, "scan", "decay", "--primes", "5,11,23", "--csv", str(csv), "--slope-min", "-1", "--slope-max", "0")
    assert code == 0
    rows = load_report(csv)
    assert [r["p"] for r in rows] == [5, 11, 23]


def test_signal_input_and_mf_output(tmp_path, capsys):
    sig = tmp_path / "f.jsonl"
    sig.write_text("[0, 1.0]\n")
    mf = tmp_path / "mf.jsonl"
    code, out, _ = run(capsys, "maximal", "--count", "1", "--signal", str(sig), "--mf-out", str(mf))
    assert code == 0
    assert [json.loads(line) for line in mf.read_text().splitlines()] == [[-48, 0.2], [-47, 0.25], [-34, 1 / 3], [-31, 0.5], [-25, 1.0]]


def test_inspect_proof(capsys):
    code, out, _ = run(capsys, "inspect", "proof", "--count", "4", "--trials", "1", "--alpha", "1")
    assert code == 0
    assert json.loads(out)["payload"]["data"]["inspections"][0]["checks"]["generous_domination"]


@pytest.mark.parametrize("family", ["squares-baseline"])
def test_squares_baseline_is_report_only(capsys, family):
    code, out, _ = run(capsys, "probe", "--count", "3", "--family", family, "--trials", "1", "--bound", "0")
    assert code == 0
