"""Command-line interface: subcommands, exit codes, output formats."""

import json

import pytest

from magset.cli import main


def run(capsys, *argv):
    """Invoke the CLI in-process; return (exit_code, stdout, stderr)."""
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


# -- construct ----------------------------------------------------------------

def test_construct_example_q40(capsys):
    code, out, _ = run(capsys, "construct", "--q", "40")
    assert code == 0
    assert "size = 6" in out
    assert "elements = 1,5,8,9,17,33" in out
    assert "tight" in out


def test_construct_example_q190(capsys):
    code, out, _ = run(capsys, "construct", "--q", "190")
    assert code == 0
    assert "size = 47" in out


def test_construct_usage_error_on_bad_modulus(capsys):
    code, _, err = run(capsys, "construct", "--q", "21")
    assert code == 2
    assert "divisible by 3" in err


def test_construct_json_roundtrips_through_verify(capsys):
    code, out, _ = run(capsys, "construct", "--q", "44", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["q"] == 44 and data["size"] == 10
    assert data["verified"] is True
    csv = ",".join(str(x) for x in data["elements"])
    code, out, _ = run(capsys, "verify", "--q", "44", "--lambda", "4",
                       "--set", csv)
    assert code == 0
    assert out.startswith("valid")


# -- verify ---------------------------------------------------------------------

def test_verify_valid(capsys):
    code, out, _ = run(capsys, "verify", "--q", "40", "--lambda", "4",
                       "--set", "1,5,8,9,17,33")
    assert code == 0 and out.startswith("valid")


def test_verify_invalid_prints_witness(capsys):
    code, out, _ = run(capsys, "verify", "--q", "9", "--lambda", "4",
                       "--set", "1,2")
    assert code == 1
    assert "2*1 == 1*2 (mod 9)" in out


def test_verify_parse_error(capsys):
    code, _, err = run(capsys, "verify", "--q", "20", "--lambda", "4",
                       "--set", "1,x")
    assert code == 2
    assert "not a comma-separated integer list" in err


def test_verify_domain_error_is_exit_1(capsys):
    code, _, err = run(capsys, "verify", "--q", "20", "--set", "25")
    assert code == 1
    assert "error:" in err


# -- search ----------------------------------------------------------------------

def test_search_example_q44(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--q", "44", "--lambda", "4",
                       "--cache", str(tmp_path / "c.jsonl"))
    assert code == 0
    assert "max size = 10" in out
    assert "witness = 1,5,7,9,19,25,35,37,39,43" in out


def test_search_trivial_modulus(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--q", "2", "--lambda", "4",
                       "--cache", str(tmp_path / "c.jsonl"))
    assert code == 0 and "max size = 0" in out


def test_search_budget_exhaustion_exits_1(capsys, tmp_path):
    code, out, err = run(capsys, "search", "--q", "106", "--budget", "5",
                         "--cache", str(tmp_path / "c.jsonl"))
    assert code == 1
    assert "max size >=" in out
    assert "budget exhausted" in err


def test_search_default_cache_in_cwd(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("MAGSET_CACHE", raising=False)
    code, _, _ = run(capsys, "search", "--q", "20")
    assert code == 0
    assert (tmp_path / "magset-cache.jsonl").exists()


def test_search_cache_env_override(capsys, tmp_path, monkeypatch):
    target = tmp_path / "env-cache.jsonl"
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("MAGSET_CACHE", str(target))
    code, _, _ = run(capsys, "search", "--q", "20")
    assert code == 0
    assert target.exists()
    assert not (tmp_path / "magset-cache.jsonl").exists()
    record = json.loads(target.read_text().splitlines()[0])
    assert record["q"] == 20 and record["max_size"] == 4


def test_search_json_output(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--q", "44", "--json",
                       "--cache", str(tmp_path / "c.jsonl"))
    assert code == 0
    record = json.loads(out)
    assert record["max_size"] == 10 and record["exact"] is True


# -- table -----------------------------------------------------------------------

def test_table_rows_match_frozen_parameters(capsys):
    code, out, _ = run(capsys, "table", "--family", "2p", "--max-p", "32")
    assert code == 0
    lines = [line.split() for line in out.splitlines() if line[:1].isdigit()]
    rows = {int(cells[0]): cells for cells in lines}
    assert rows[29][1:6] == ["28", "11", "-", "-", "14"]
    assert rows[23][1:6] == ["11", "4", "1", "3", ">=8"]
    assert rows[11][1:6] == ["5", "2", "1", "1", ">=3"]


def test_table_markdown_mode(capsys):
    code, out, _ = run(capsys, "table", "--family", "2p", "--max-p", "20",
                       "--md")
    assert code == 0
    assert "| p | n | m | k' | r' | size | witness |" in out
    assert "| 5 | 4 | 1 | - | - | 2 | 1 9 |" in out


def test_table_oracle_marks_tightness(capsys):
    code, out, _ = run(capsys, "table", "--family", "2p", "--max-p", "20",
                       "--oracle")
    assert code == 0
    assert "TIGHT" in out and "GAP" not in out


def test_table_requires_family(capsys):
    code, _, _ = run(capsys, "table", "--max-p", "20")
    assert code == 2


# -- bound and codec passthroughs ---------------------------------------------

def test_bound(capsys):
    code, out, _ = run(capsys, "bound", "--q", "40", "--lambda", "4")
    assert code == 0 and out.strip() == "9"


def test_encode(capsys):
    code, out, _ = run(capsys, "encode", "--q", "20", "--set", "1,9,13,17",
                       "--message", "2,0,0")
    assert code == 0 and out.strip() == "2,2,0,0"


def test_encode_invalid_set_is_domain_error(capsys):
    code, _, err = run(capsys, "encode", "--q", "20", "--set", "5",
                       "--message", "")
    assert code == 1
    assert "not a valid set" in err


def test_decode_corrects(capsys):
    code, out, _ = run(capsys, "decode", "--q", "20", "--set", "1,9,13,17",
                       "--word", "2,5,0,0")
    assert code == 0
    assert "corrected (pos 1, mag 3)" in out
    assert "codeword: 2,2,0,0" in out


def test_decode_clean_word(capsys):
    code, out, _ = run(capsys, "decode", "--q", "20", "--set", "1,9,13,17",
                       "--word", "2,2,0,0")
    assert code == 0 and "no error" in out


def test_decode_detection_exits_1(capsys):
    code, out, _ = run(capsys, "decode", "--q", "20", "--set", "1,9,13,17",
                       "--word", "3,3,0,0")
    assert code == 1
    assert "detected" in out


def test_simulate_json_and_determinism(capsys):
    args = ("simulate", "--q", "20", "--set", "1,9,13,17",
            "--trials", "1000", "--seed", "7")
    code, out1, _ = run(capsys, *args)
    assert code == 0
    stats = json.loads(out1)
    assert stats == {"trials": 1000, "corrected": 1000, "detected": 0,
                     "miscorrected": 0, "seed": 7}
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_no_subcommand_is_usage_error(capsys):
    code, _, _ = run(capsys)
    assert code == 2
