import json

import pytest

from bipswitch.cli import main
from bipswitch.bigraph import Realization
from bipswitch.flow import hk_sequence


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count(capsys):
    assert run(capsys, "count", "--hk", "1", "--n", "3")[:2] == (0, "5\n")
    code, out, _ = run(capsys, "--json", "count", "--g", "3")
    assert json.loads(out) == {"count": 8}
    assert run(capsys, "count", "--g", "2", "--method", "components")[1] == "4\n"


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--seq", '{"degA":[3,2,1],"degB":[1,2,3]}')
    assert code == 0 and out.splitlines()[0] == "6 components"
    code, out, _ = run(capsys, "decompose", "--json", "--g", "2")
    assert json.loads(out)["splitPoints"] == [[2, 2]]


def test_stability_csv(capsys):
    code, out, _ = run(capsys, "stability", "--kmax", "2", "--nmax", "20")
    lines = out.splitlines()
    assert code == 0 and "r_ratio" in lines[0].split(",")
    assert len(lines) == 1 + 19 + 18  # k=0 rows start at n=2, k=1 rows at n=3


def test_sample_deterministic(capsys, tmp_path):
    argv = ["sample", "--hk", "2", "--n", "6", "--steps", "3000", "--seed", "41"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b
    G = Realization.from_edgelist(a, 6, 6)
    assert G.degree_sequence() == hk_sequence(6, 2)
    out = tmp_path / "g.txt"
    assert run(capsys, *argv, "--out", str(out))[1] == ""
    assert out.read_text() == a


def test_enumerate(capsys):
    code, out, _ = run(capsys, "--json", "enumerate", "--hk", "1", "--n", "3")
    assert len(json.loads(out)) == 5
    assert run(capsys, "enumerate", "--h0", "3", "--count-only")[1] == "1\n"


def test_flow(capsys):
    code, out, _ = run(capsys, "flow", "--seq", '{"degA":[7,7,6,5,4,3,3,1],"degB":[1,4,3,4,5,6,7,6]}')
    assert code == 0
    assert "excess a1 1" in out and "excess b2 2" in out and "excess a7 -1" in out and "excess b8 -2" in out
    assert out.rstrip().endswith("round-trip ok")


def test_flow_from_file(capsys, tmp_path):
    f = tmp_path / "x.txt"
    f.write_text("1 1\n1 2\n2 3\n3 2\n3 3\n")
    code, out, _ = run(capsys, "--json", "flow", "--seq", '{"degA":[2,1,2],"degB":[1,2,2]}', "--graph", str(f))
    data = json.loads(out)
    assert code == 0 and data["roundTrip"] and data["k"] == 2


def test_buffer_and_path(capsys):
    code, out, _ = run(capsys, "--json", "buffer", "--hk", "1", "--n", "8", "--i", "1", "--z", "5", "--seed", "3")
    assert code == 0 and set(json.loads(out)) == {"x", "y", "buffer"}
    code, out, _ = run(capsys, "path", "--hk", "1", "--n", "8", "--seed", "3")
    assert code == 0 and out.startswith("length ")
    code, out, _ = run(capsys, "--json", "path", "--load", "--hk", "1", "--n", "4")
    assert json.loads(out)["stateCount"] == 13


def test_mix(capsys):
    code, out, _ = run(capsys, "mix", "--g", "2", "--eps", "0.25", "0.01")
    assert "tau 0.25 185" in out and "tau 0.01 822" in out and "t,worst_tv" in out
    code, out, _ = run(capsys, "--json", "mix", "--g", "2")
    assert json.loads(out)["tauEpsilon"] == {"0.25": 185}


def test_check(capsys):
    code, out, _ = run(capsys, "check", "bijection")
    assert code == 0 and out.startswith("PASS")


def test_check_failure_names_assertion(capsys):
    code, out, err = run(capsys, "check", "encoding")
    assert code == 1 and "FAIL" in out and "first failure" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["check", "unknown"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_domain_errors(capsys):
    code, _, err = run(capsys, "sample", "--seq", '{"degA":[2,2],"degB":[1,1]}')
    assert code == 1 and "NotGraphic" in err
    code, _, err = run(capsys, "count", "--hk", "1")
    assert code == 1 and "--n" in err
    code, _, err = run(capsys, "mix", "--hk", "1", "--n", "7")
    assert code == 1 and "OracleLimitExceeded" in err
