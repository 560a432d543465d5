import json
import subprocess
import sys

import jsonschema
import pytest

from approxap import __version__
from approxap.cli import load_schema, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.Draft202012Validator(load_schema(doc["config"]["command"])).validate(doc)
    return doc


def test_bound(capsys):
    doc = run_json(capsys, "bound", "--k", "5", "--eps", "1/10")
    res = doc["result"]
    assert res["half_inv"] == 5 and res["epsilon"] == "1/10"
    assert res["s_star"] == pytest.approx(0.9306765580733931)
    assert doc["config"]["eps"] == "1/10"


def test_search_exact_primes(capsys):
    doc = run_json(capsys, "search", "--primes", "10", "--k", "3", "--exact")
    assert doc["result"]["relative_error"] == "0/1"
    assert doc["result"]["heuristic"] is False


def test_gen_then_search_powers(capsys, tmp_path):
    f = tmp_path / "f.txt"
    doc = run_json(capsys, "gen", "powers", "--base", "2", "--limit", "16", "--out", str(f))
    assert doc["result"]["size"] == 4
    doc = run_json(capsys, "search", "--set", str(f), "--k", "4", "--exact")
    num, den = map(int, doc["result"]["relative_error"].split("/"))
    assert num > 0


def test_search_range_and_heuristic(capsys):
    doc = run_json(capsys, "search", "--primes", "100", "--k", "3", "--exact", "--range", "2..30")
    assert doc["result"]["relative_error"] == "0/1"
    doc = run_json(capsys, "search", "--primes", "100", "--k", "3")
    assert doc["result"]["heuristic"] is True


def test_witness_found_and_exhausted(capsys):
    doc = run_json(capsys, "witness", "--primes", "1000", "--k", "3", "--eps", "1/6")
    assert doc["result"]["found"] is True
    doc = run_json(capsys, "witness", "--powers", str(2**30), "--k", "4", "--eps", "1/6")
    assert doc["result"]["found"] is False
    assert doc["result"]["strongest_bounds"]


def test_cover(capsys):
    doc = run_json(capsys, "cover", "--powers", str(2**20), "--k", "4", "--eps", "1/4", "--m", "0", "--n", str(2**20))
    out = doc["result"]
    assert out["outcome"]["kind"] == "bound"
    assert out["levels"][0]["intervals"] == [["1/1", "1048576/1", True]]
    code, text, _ = run(capsys, "cover", "--powers", "1024", "--k", "4", "--eps", "1/4", "--m", "0", "--n", "1024", "--format", "text")
    assert code == 0 and "budget" in text and "bound:" in text


def test_density_and_recip(capsys):
    doc = run_json(capsys, "density", "--squares", "10000")
    assert [e["n"] for e in doc["result"]["entries"]] == [2**i for i in range(1, 14)]
    doc = run_json(capsys, "density", "--primes", "1000", "--schedule", "10,100")
    assert [e["n"] for e in doc["result"]["entries"]] == [10, 100]
    doc = run_json(capsys, "recip", "--primes", "10", "--T", "10")
    assert doc["result"]["partial_sum"] == "247/210"
    assert doc["result"]["inequality_holds"] is True


def test_erdos_commands(capsys):
    doc = run_json(capsys, "erdos", "--N", "10", "--L", "2")
    assert doc["result"]["records"][0]["A"] == 7
    doc = run_json(capsys, "erdos-scan", "--L", "4", "--schedule", "10^3..10^5")
    assert doc["result"]["first_below_half"] == 1000
    assert [r["N"] for r in doc["result"]["records"]] == [1000, 10000, 100000]


CSV_HEADERS = {
    ("search", "--primes", "30", "--k", "3"): "slot,point,element,distance",
    ("density", "--primes", "100"): "n,best_count,best_m,ratio",
    ("recip", "--primes", "100", "--T", "50"): "N,block_lo,block_hi,count,weight",
    ("erdos", "--N", "100", "--L", "2"): "N,L,p_L,A,sqrt_bound,tail_sum,sqrt_bound_holds,tail_holds,below_half",
    ("cover", "--primes", "100", "--k", "3", "--eps", "1/4", "--m", "0", "--n", "50"): "level,intervals,budget",
    ("bound", "--k", "3", "--eps", "1/4"): "k,half_inv,epsilon,epsilon_requested,kept_per_step,pieces_per_step,s_star",
}


@pytest.mark.parametrize("argv", list(CSV_HEADERS))
def test_csv_headers(capsys, argv):
    code, out, _ = run(capsys, *argv, "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == CSV_HEADERS[argv]


def test_decimal_eps_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bound", "--k", "5", "--eps", "0.1"])
    assert exc.value.code == 2
    assert "decimals" in capsys.readouterr().err


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "argv,code",
    [
        (["gen", "powers", "--limit", "1", "--out", "/dev/null"], "empty-set"),
        (["bound", "--k", "3", "--eps", "3/4"], "invalid-argument"),
        (["search", "--primes", "1000", "--k", "3", "--exact"], "oracle-too-large"),
        (["erdos", "--N", "100000000", "--L", "2"], "resource-error"),
        (["density", "--primes", "100", "--max-sieve", "10"], "resource-error"),
    ],
)
def test_domain_errors_exit_1(capsys, argv, code):
    rc, out, err = run(capsys, *argv)
    assert rc == 1 and out == ""
    assert json.loads(err)["error"] == code


def test_load_errors_report_line(capsys, tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("2\n3\n1\n")
    rc, _, err = run(capsys, "search", "--set", str(f), "--k", "2")
    assert rc == 1
    assert json.loads(err) == {"error": "order-error", "message": "line 3: descending value 1 after 3", "line": 3}


def test_run_alias_returns_exit_code(capsys):
    from approxap.cli import run

    assert run(["bound", "--k", "2", "--eps", "1/2"]) == 0
    capsys.readouterr()


def test_version():
    out = subprocess.run([sys.executable, "-m", "approxap", "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == f"approxap {__version__} (schema 1)"


def test_config_is_embedded_and_threads_excluded(capsys):
    doc = run_json(capsys, "search", "--primes", "30", "--k", "3", "--threads", "2")
    cfg = doc["config"]
    assert cfg["source"] == {"kind": "primes", "value": 30}
    assert cfg["k"] == 3 and cfg["slack"] == 4
    assert "threads" not in cfg


def test_text_formats(capsys):
    for argv in (
        ["search", "--primes", "30", "--k", "3"],
        ["density", "--primes", "100"],
        ["recip", "--primes", "100", "--T", "100"],
        ["erdos-scan", "--L", "2", "--schedule", "10,100"],
        ["witness", "--primes", "200", "--k", "3", "--eps", "1/4"],
        ["bound", "--k", "3", "--eps", "1/4"],
    ):
        code, out, _ = run(capsys, *argv, "--format", "text")
        assert code == 0 and out.strip()
