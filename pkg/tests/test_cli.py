import io
import json
import sys

import pytest

from fastdual.cli import main


def run_cli(argv, stdin: str = "") -> tuple[int, str, str]:
    old_in, old_out, old_err = sys.stdin, sys.stdout, sys.stderr
    sys.stdin = io.StringIO(stdin)
    sys.stdout, sys.stderr = io.StringIO(), io.StringIO()
    try:
        code = main(argv)
        return code, sys.stdout.getvalue(), sys.stderr.getvalue()
    finally:
        sys.stdin, sys.stdout, sys.stderr = old_in, old_out, old_err


def test_sample_emits_code_spec_json():
    code, out, _ = run_cli(["sample", "--n", "16", "--m", "2", "--seed", "3"])
    assert code == 0
    spec = json.loads(out)
    assert spec == {"family": "RDA", "m": 2, "n": 16, "r": 2, "seed": 3,
                    "transposed": False}
    code, out, _ = run_cli(["sample", "--n", "8", "--m", "1", "--seed", "3", "--expand"])
    assert code == 0 and len(json.loads(out)["perms"]) == 2


def test_encode_stdin_zero_message():
    code, out, _ = run_cli(["encode", "--n", "16", "--m", "2", "--seed", "1"], stdin="0" * 8)
    assert code == 0
    res = json.loads(out)
    assert res["codeword"] == "0" * 16 and res["weight"] == 0


def test_encode_matches_library():
    from fastdual.bitvec import BitVector
    from fastdual.codes import encode, sample_pair

    code, out, _ = run_cli(
        ["encode", "--n", "12", "--m", "2", "--seed", "9", "--family", "RDA"],
        stdin="101010",
    )
    assert code == 0
    pair = sample_pair(12, 2, 9)
    want = encode(pair.primal, BitVector.from_string("101010")).to_string()
    assert json.loads(out)["codeword"] == want


def test_dual_check_ok():
    code, out, _ = run_cli(["dual-check", "--n", "64", "--m", "2", "--seed", "7"])
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_distance_and_failure_rate():
    code, out, _ = run_cli(["distance", "--n", "16", "--m", "2", "--seed", "5"])
    assert code == 0
    rep = json.loads(out)
    assert rep["method"] == "exhaustive" and rep["abs_distance"] >= 1
    code, out, _ = run_cli(["failure-rate", "--n", "16", "--m", "2", "--seed", "5",
                            "--d", "1", "--trials", "10"])
    assert code == 0
    assert json.loads(out)["failures"] == 0


def test_iowef_and_tail_split():
    code, out, _ = run_cli(["iowef", "--n", "16", "--m", "1", "--d", "4"])
    assert code == 0
    res = json.loads(out)
    assert res["bound"] == pytest.approx(sum(res["counts"][1:5]), rel=1e-9)
    code, out, _ = run_cli(["tail-split", "--n", "32", "--m", "2", "--d", "4", "--h", "8"])
    assert code == 0
    res = json.loads(out)
    assert res["star"] + res["starstar"] == pytest.approx(res["total"], rel=1e-9)


def test_spectral_csv_and_delta():
    code, out, _ = run_cli(["spectral", "--family", "A", "--m", "1", "--grid-step", "0.01"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "gamma,value" and len(lines) == 102
    code, out, _ = run_cli(["delta", "--m", "2", "--tol", "1e-7"])
    assert code == 0
    assert abs(json.loads(out)["delta"] - 0.02859547585) < 1e-5


def test_emvp_demo_cli():
    code, out, err = run_cli(["emvp-demo", "--n", "32", "--m", "2", "--rows", "8",
                              "--seed", "3", "--queries", "5"])
    assert code == 0
    assert json.loads(out)["pass"] is True
    assert "PASS" in err


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["distance", "--n", "16"])  # missing --m
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["not-a-command"])
    # semantic errors also exit 2 with a message naming the problem
    code, _, err = run_cli(["dual-check", "--n", "7", "--m", "1"])
    assert code == 2 and "even" in err


def test_cap_refusal_is_explicit():
    code, _, err = run_cli(["distance", "--n", "64", "--m", "2", "--seed", "0"])
    assert code == 2 and "exceeds cap" in err


def test_determinism_byte_identical():
    cmds = [
        ["sample", "--n", "32", "--m", "2", "--seed", "11"],
        ["dual-check", "--n", "32", "--m", "2", "--seed", "11"],
        ["distance", "--n", "24", "--m", "3", "--seed", "4"],
        ["iowef", "--n", "24", "--m", "2", "--d", "5"],
        ["tail-split", "--n", "24", "--m", "2", "--d", "5"],
        ["spectral", "--family", "DA", "--m", "2", "--grid-step", "0.01"],
    ]
    for argv in cmds:
        _, out1, _ = run_cli(argv)
        _, out2, _ = run_cli(argv)
        assert out1 == out2 and out1


def test_out_flag_writes_file(tmp_path):
    path = tmp_path / "spec.json"
    code, out, _ = run_cli(["sample", "--n", "8", "--m", "1", "--seed", "0",
                            "--out", str(path)])
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["n"] == 8
