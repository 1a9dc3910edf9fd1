import csv
import json
import subprocess
import sys

import pytest

from logdelpezzo.cli import main, parse_grid, UsageError
from logdelpezzo.families import p2_chain, p2_conic
from logdelpezzo.io import chain_document_for, dumps_chain


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    lines = text.strip().splitlines()
    return list(csv.DictReader(lines))


def test_beta_conic(capsys):
    code, out, _ = run(["beta", "--pair", "p2:delta=1/2", "--divisor", "conic", "--format", "csv"], capsys)
    assert code == 0
    (row,) = csv_rows(out)
    assert row["beta"] == "1/3" and row["closed_form"] == "1/3" and row["consistent"] == "true"


def test_beta_diagonal_and_toric(capsys):
    code, out, _ = run(["beta", "--pair", "p1xp1:delta=1/2", "--divisor", "diagonal", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["rows"][0]["beta"] == "0"
    code, out, _ = run(["beta", "--pair", "p2:delta=0", "--divisor", "toric:2,1", "--format", "csv"], capsys)
    (row,) = csv_rows(out)
    assert row["beta"] == "0" and row["oracle_beta"] == "0" and row["product_type"] == "ProductType"


def test_sweep_conic_grid(capsys):
    code, out, _ = run(["sweep", "--pair", "p2", "--grid", "0:3/4:1/8", "--divisor", "conic"], capsys)
    rows = csv_rows(out)
    assert code == 0 and len(rows) == 7
    assert rows[-1]["beta"] == "0" and rows[-1]["delta"] == "3/4"


def test_sweep_hirzebruch_negative(capsys):
    code, out, _ = run(["sweep", "--pair", "fm:m=2,d2=0", "--param", "d1",
                        "--grid", "1/6,1/3,1/2,2/3,5/6"], capsys)
    rows = csv_rows(out)
    assert code == 0 and all(r["sign"] == "negative" for r in rows)


def test_empty_grid(capsys):
    code, _, err = run(["sweep", "--pair", "p2", "--grid", " "], capsys)
    assert code == 2 and "empty grid" in err
    with pytest.raises(UsageError):
        parse_grid("1:0:1/2")


def test_grid_forms():
    assert [str(v) for v in parse_grid("0:1/2:1/4")] == ["0", "1/4", "1/2"]
    assert [str(v) for v in parse_grid("1/3, 2/3")] == ["1/3", "2/3"]
    for bad in ("0:1", "0:1:0", "a,b", "0.5"):
        with pytest.raises(UsageError):
            parse_grid(bad)


def test_parse_errors_exit_two(capsys):
    for argv in (["beta", "--pair", "p9:delta=0", "--divisor", "conic"],
                 ["beta", "--pair", "p2:delta=2", "--divisor", "conic"],
                 ["beta", "--pair", "p2:delta=0.5", "--divisor", "conic"],
                 ["beta", "--pair", "p2:delta=1/2", "--divisor", "wobble"],
                 ["beta", "--pair", "p2:delta=1/2"],
                 ["beta", "--pair", "p2:delta=1/2", "--divisor", "p2ex:5"],
                 ["frobnicate"]):
        code, _, _ = run(argv, capsys)
        assert code == 2, argv


def test_refusal_exit_one(tmp_path, capsys):
    # without the fibres through p1 the catalog cannot pin down the zero of the volume
    doc = {"base": "P1xP1", "boundary": [{"curve": "C", "class": [1, 1], "coefficient": "1/3"}],
           "aux": [{"id": "C", "class": [1, 1]}],
           "steps": [{"on_aux": ["C"]}]}
    path = tmp_path / "chain.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(["beta", "--input", str(path)], capsys)
    assert code == 1
    body = json.loads(err)
    assert body["status"] == "refused" and "irrational" in body["message"]


def test_input_document(tmp_path, capsys):
    pair = p2_conic("1/2")
    path = tmp_path / "c.json"
    path.write_text(dumps_chain(chain_document_for(pair, p2_chain(pair, 3, 2, 2))))
    code, out, _ = run(["beta", "--input", str(path), "--format", "csv"], capsys)
    assert code == 0 and csv_rows(out)[0]["beta"] == "1/21"
    (tmp_path / "bad.json").write_text("{")
    code, _, err = run(["beta", "--input", str(tmp_path / "bad.json")], capsys)
    assert code == 2 and "line 1" in err
    code, _, _ = run(["beta", "--input", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_volume_command(capsys, tmp_path):
    code, out, _ = run(["volume", "--pair", "p2:delta=0", "--divisor", "nondreamy",
                        "--samples", "4", "--format", "json"], capsys)
    body = json.loads(out)
    assert code == 0 and body["tau"] == "9"
    assert body["pieces"] == [{"start": "0", "end": "9", "c0": "9", "c1": "0", "c2": "-1/9"}]
    assert [r["vol"] for r in body["rows"]] == ["9", "8", "5", "0"]
    target = tmp_path / "v.csv"
    code, out, _ = run(["volume", "--pair", "p2:delta=1/4", "--divisor", "blowup:on",
                        "--format", "csv", "-o", str(target)], capsys)
    assert code == 0 and out == "" and target.read_text().startswith("x,x_decimal,vol")


def test_reproduce_sections(capsys):
    for section in ("P2_ex", "non_dreamy"):
        code, out, _ = run(["reproduce", section], capsys)
        assert code == 0 and "all match" in out


def test_output_is_deterministic_across_workers(monkeypatch, capsys):
    argv = ["sweep", "--pair", "p2", "--grid", "0:3/4:1/8", "--divisor", "conic",
            "--divisor", "toric:3,2", "--divisor", "chain:3,1,jc=3"]
    monkeypatch.setenv("LOGDELPEZZO_WORKERS", "1")
    _, serial, _ = run(argv, capsys)
    monkeypatch.setenv("LOGDELPEZZO_WORKERS", "2")
    _, parallel, _ = run(argv + ["--seed", "7"], capsys)
    assert serial == parallel and serial


def test_bad_worker_env(monkeypatch, capsys):
    monkeypatch.setenv("LOGDELPEZZO_WORKERS", "many")
    code, _, err = run(["sweep", "--pair", "p2", "--grid", "0"], capsys)
    assert code == 2 and "LOGDELPEZZO_WORKERS" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "logdelpezzo.cli", "beta", "--pair",
                           "p2:delta=1/2", "--divisor", "blowup:on", "--format", "csv"],
                          capture_output=True, text=True, check=True)
    assert ",1/9," in proc.stdout


def test_parse_errors_are_json(tmp_path, capsys):
    (tmp_path / "c.json").write_text('{"base": "P2", "boundary": [], "steps": "x"}')
    code, _, err = run(["beta", "--input", str(tmp_path / "c.json")], capsys)
    body = json.loads(err)
    assert code == 2 and body["status"] == "parse_error"


def test_certify_only(capsys):
    code, out, _ = run(["beta", "--pair", "p2:delta=1/4", "--divisor", "chain:8,1,jc=4",
                        "--certify-only", "--format", "csv"], capsys)
    (row,) = csv_rows(out)
    assert code == 0 and row["certified"] == "true" and "beta" not in row
    assert row["epsilon"] and row["tau"]
    code, out, _ = run(["sweep", "--pair", "p2", "--grid", "0,1/2", "--divisor", "toric:5,2",
                        "--certify-only"], capsys)
    assert code == 0 and len(csv_rows(out)) == 2


def test_workers_flag(capsys):
    argv = ["sweep", "--pair", "p1xp1", "--grid", "1/8:7/8:1/8", "--divisor", "diagonal"]
    _, serial, _ = run(argv + ["--workers", "1"], capsys)
    _, parallel, _ = run(argv + ["--workers", "2", "--seed", "3"], capsys)
    assert serial == parallel
    code, _, _ = run(argv + ["--workers", "0"], capsys)
    assert code == 2
