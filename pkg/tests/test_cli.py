import io
import json
import os

from k3carpets.carpets import CarpetParams
from k3carpets.cli import main
from k3carpets.pipeline import resolution_for
from k3carpets.linalg import SparseIntMatrix, smith_normal_form
from k3carpets.schreyer import BettiTable, betti_table
from k3carpets.strands import minimal_betti_table


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_ideal_text():
    code, out, _ = run("ideal", "--a", "2", "--b", "2")
    assert code == 0
    assert out.splitlines() == ["x1^2-x0*x2", "x2*y0-2*x1*y1+x0*y2", "y1^2-y0*y2"]


def test_ideal_json_and_quartic():
    code, out, _ = run("ideal", "--a", "6", "--b", "6", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 55 and len(doc["lead_terms"]) == 55
    assert doc["config"]["e1"] == 2 and doc["config"]["e2"] == 1
    code, out, _ = run("ideal", "--a", "1", "--b", "1")
    assert code == 0 and len(out.splitlines()) == 1


def test_negative_e():
    code, out, _ = run("ideal", "--a", "2", "--e=-1,1")
    assert code == 0
    assert "x2*y0+x1*y1+x0*y2" in out.splitlines()


def test_invalid_parameters():
    for argv in [("ideal", "--a", "2", "--b", "3"), ("ideal", "--b", "2"), ("ideal", "--a", "0"),
                 ("betti", "--a", "3", "--char", "4"), ("ideal", "--a", "2", "--e", "x"),
                 ("frobnicate", "--a", "2"), ("green", "--a", "3", "--budget", "0")]:
        code, out, err = run(*argv)
        assert code == 2, argv
        assert err


def test_green_text():
    code, out, _ = run("green", "--a", "3", "--b", "3")
    assert code == 0
    assert "exceptional_primes: [2]" in out and "det: 2^4" in out


def test_green_json_with_tables():
    code, out, _ = run("green", "--a", "3", "--format", "json", "--tables")
    doc = json.loads(out)
    assert code == 0
    assert doc["exceptional_primes"] == [2]
    assert set(doc["per_prime_tables"]) == {"0", "2"}


def test_betti_char_3(res66):
    code, out, _ = run("betti", "--a", "6", "--b", "6", "--char", "3")
    assert code == 0
    rows = {line.split(":")[0].strip(): line.split()[1:] for line in out.splitlines()[1:]}
    assert rows["1"][6] == "48" and rows["1"][7] == "7"


def test_betti_json_roundtrip():
    code, out, _ = run("betti", "--a", "4", "--b", "3", "--format", "json")
    assert code == 0
    assert BettiTable.from_json(json.loads(out)["betti"]) == minimal_betti_table(4, 3)


def test_certify():
    code, out, _ = run("certify", "--a", "4", "--b", "3")
    assert code == 0
    assert out.count("pass") == 7 and "FAIL" not in out
    code, out, _ = run("certify", "--a", "3", "--b", "1", "--e=0,1", "--format", "json")
    assert code == 0 and json.loads(out)["all_pass"]


def test_resolve_with_matrix_dump(tmp_path):
    d = tmp_path / "mats"
    code, out, _ = run("resolve", "--a", "3", "--degree", "4", "--matrix-out", str(d))
    assert code == 0
    assert "total:" in out
    path = d / "strand4_D3.txt"
    text = path.read_text()
    M = SparseIntMatrix.from_text(text)
    assert M.to_text() == text
    T = betti_table(resolution_for(CarpetParams(3, 3)))
    assert M.shape == (T[(2, 4)], T[(3, 4)])
    assert smith_normal_form(M).product() == 16
    code, out, _ = run("snf", str(path))
    assert code == 0 and "product: 2^4" in out


def test_resolve_matrix_out_needs_degree(tmp_path):
    code, _, err = run("resolve", "--a", "3", "--matrix-out", str(tmp_path))
    assert code == 2 and "--degree" in err


def test_strand_and_snf():
    code, out, _ = run("strand", "--a", "3", "--char", "2")
    assert code == 0
    assert "F_3: rank 9, homology 3" in out
    code, out, _ = run("snf", "--a", "4", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["product"] == "2^32*3^6" and doc["rank"] == 64


def test_scan_and_budget():
    code, out, _ = run("scan", "--a", "4", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and [r["exceptional_primes"] for r in doc["rows"]] == [[], [2], [2, 3]]
    code, out, err = run("resolve", "--a", "7", "--b", "7", "--budget", "1", "--format", "json")
    assert code == 3
    assert json.loads(out)["partial"] is True


def test_missing_matrix_file(tmp_path):
    code, _, err = run("snf", str(tmp_path / "nope.txt"))
    assert code == 2 and err


def test_deterministic_output():
    a = run("green", "--a", "4", "--format", "json")
    b = run("green", "--a", "4", "--format", "json")
    assert a == b and a[0] == 0
