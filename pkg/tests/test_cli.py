import csv
import json
import subprocess
import sys

import gmpy2
import pytest

from aterm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def json_lines(out):
    return [json.loads(line) for line in out.splitlines()]


def test_eval_gcd_expression(capsys):
    code, out, _ = run(capsys, "eval", "x^(a+a*b)/((x^a-1)*(x^b-1))%x", "--var", "x=13", "--var", "a=12", "--var", "b=18")
    assert (code, out) == (0, "6\n")


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", "0^0", "--json")
    (obj,) = json_lines(out)
    assert code == 0 and obj["result"] == 1 and obj["expr"] == "0^0"
    assert set(obj) == {"expr", "result", "peak_bits", "elapsed_ms"}


def test_eval_stats(capsys):
    code, out, _ = run(capsys, "eval", "3^5*2", "--stats")
    assert code == 0 and out.splitlines()[0] == "486"
    assert "peak_bits 9" in out and "mul_count 1" in out


def test_eval_big_result_json(capsys):
    code, out, _ = run(capsys, "eval", "7^20000", "--json", "--strategy", "rewrite")
    # 7^20000 has ~17000 digits, past int()'s default conversion limit
    assert code == 0 and out.startswith('{"expr": "7^20000", "result": ' + gmpy2.mpz(7 ** 20000).digits() + ",")


@pytest.mark.parametrize("argv, code", [
    (["eval", "1/0"], 4),
    (["eval", "2^(0-1)"], 4),
    (["eval", "1 +"], 2),
    (["eval", "x"], 2),
    (["eval", "2^100000", "--budget-bits", "1000"], 3),
    (["eval", "2^(2^70)"], 3),
    (["eval", "1", "--var", "x"], 2),
    (["gcd", "0", "3"], 2),
    (["gcd", "12", "18", "--method", "poly_base", "--base", "5"], 2),
    (["factor", "30"], 1),
    (["factor", "143", "--mode", "pure"], 3),
    (["factor", "49", "--strict"], 2),
    (["bench", "--suite", "gcd-methods", "--min", "5", "--max", "4", "--csv", "x.csv"], 2),
    (["verify", "--suite", "nope"], 2),
    ([], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_syntax_error_shows_caret(capsys):
    _, out, err = run(capsys, "eval", "2*-x")
    assert out == "" and "0-x" in err and "  ^" in err


@pytest.mark.parametrize("argv, text", [
    (["factor", "15", "--mode", "pure"], "3 5"),
    (["totient", "21", "--mode", "hybrid"], "12"),
    (["gcd", "12", "18", "--method", "modmod"], "6"),
    (["isqrt", "15"], "3"),
    (["isqrt", "2"], "1"),
    (["factorial", "5"], "120"),
    (["factorial", "10", "--method", "matiyasevich"], "3628800"),
    (["term", "gcd", "12", "18", "--method", "modmod"], "(0-13^(12+12*18)%(13^(12+18)-13^12-13^18+1))%13"),
])
def test_text_output(capsys, argv, text):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.strip() == text


def test_factor_json(capsys):
    code, out, _ = run(capsys, "factor", "77", "--json")
    (obj,) = json_lines(out)
    assert code == 0
    assert {k: obj[k] for k in ("n", "p", "q", "mode", "omega", "verified")} == {
        "n": 77, "p": 7, "q": 11, "mode": "hybrid", "omega": 8, "verified": True}
    assert obj["gamma_bits"] == 40320 .bit_length()


def test_square_note_on_stderr(capsys):
    code, out, err = run(capsys, "factor", "49", "--json")
    assert code == 0 and json.loads(out)["p"] == 7 and "square" in err


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "2^10")
    assert code == 0 and out.splitlines()[0] == "total_bound_bits 20"
    code, out, _ = run(capsys, "estimate", "x^(a+a*b)", "--var", "x=7", "--var", "a=3", "--var", "b=5", "--json")
    obj = json.loads(out)
    assert obj["root_bits"] >= 51 and obj["nodes"][0]["path"] == ""


def test_estimate_pure_gamma_term_for_143(capsys):
    code, out, _ = run(capsys, "term", "factorial", "11")
    code, out, _ = run(capsys, "estimate", out.strip(), "--json")
    assert code == 0 and json.loads(out)["total_bound_bits"] > 10 ** 9


def test_verify_gcd(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "gcd", "--max", "32")
    assert code == 0 and "cases 1024  passed 1024  mismatches 0" in out


def test_verify_json_stream(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "isqrt", "--min", "1", "--max", "20", "--json")
    lines = json_lines(out)
    assert code == 0
    assert all(line["type"] == "case" for line in lines[:-1]) and lines[-1]["type"] == "report"
    assert lines[-1]["excluded"][0]["inputs"] == {"n": 2}


def test_verify_base2_fails(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "base2-evenness", "--max", "4", "--json")
    assert code == 1 and json_lines(out)[-1]["mismatches"]


def test_verify_strict_budget(capsys):
    assert run(capsys, "verify", "--suite", "factorial", "--min", "7", "--max", "7")[0] == 0
    assert run(capsys, "verify", "--suite", "factorial", "--min", "7", "--max", "7", "--strict")[0] == 3


def test_bench_csv(capsys, tmp_path):
    path = tmp_path / "b.csv"
    code, out, _ = run(capsys, "bench", "--suite", "gcd-methods", "--max", "6", "--csv", str(path), "--json")
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 3 * 36 and all(r["ok"] == "true" for r in rows)
    assert {line["method"] for line in json_lines(out)} == {"poly_base", "modmod", "euclid"}


def test_budget_env_var(capsys, monkeypatch):
    monkeypatch.setenv("ATERM_BUDGET_BITS", "256")
    assert run(capsys, "eval", "2^300")[0] == 3


def test_module_entry_point_keeps_stdout_clean():
    proc = subprocess.run([sys.executable, "-m", "aterm", "factor", "49", "--json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["q"] == 7 and proc.stderr
    proc = subprocess.run([sys.executable, "-m", "aterm", "eval", "1/0", "--json"], capture_output=True, text=True)
    assert proc.returncode == 4 and proc.stdout == ""
