import json
import subprocess
import sys

import pytest

from ncspheres.cli import algebra_by_name, main, run_suite, suite_registry

REQUIRED_SUITES = {
    "spheres-presentations",
    "unipotents",
    "ktheory-generators",
    "representations",
    "fredholm-cocycles",
    "pairings",
    "theta4",
    "theta-clifford",
    "twist-lemmas",
    "moyal",
    "poisson",
    "bicomplex",
}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_registry_contains_every_required_suite():
    assert REQUIRED_SUITES <= set(suite_registry())


def test_pairing_json(capsys):
    code, out, _ = run(capsys, "pairing", "--family", "even", "--n", "2", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"n": 2, "matrix": [[1, 2], [0, 1]], "determinant": 1, "exact": True}


def test_pairing_csv_and_odd(capsys):
    code, out, _ = run(capsys, "pairing", "--n", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["row,col,value", "0,0,1", "0,1,1", "1,0,0", "1,1,-1"]
    code, out, _ = run(capsys, "pairing", "--family", "odd", "--n", "1", "--format", "json")
    assert json.loads(out)["matrix"] == [[1]]


def test_integrate(capsys):
    code, out, _ = run(capsys, "integrate", "--sphere", "Sq5", "--a", "x1'", "--b", "x1")
    assert code == 0 and out.strip() == "1/(1-q^-2)^2"
    # the literal reading of the integral of a db is phi(a, b), antisymmetric in a and b
    code, out, _ = run(capsys, "integrate", "--sphere", "Sq5", "--a", "x1", "--b", "x1'")
    assert out.strip() == "-1/(1-q^-2)^2"
    code, out, _ = run(capsys, "integrate", "--sphere", "Sq4", "--a", "x0")
    assert out.strip() == "2/(1-q^-1)^2"


def test_integrate_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["integrate", "--sphere", "Sq4", "--a", "x0", "--b", "x1"])
    assert exc.value.code == 2
    assert "--b" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["integrate", "--sphere", "Sq9x", "--a", "x0"])
    assert exc.value.code == 2


def test_reduce(capsys):
    code, out, _ = run(capsys, "reduce", "--algebra", "Sq2", "--expr", "x1*x1'")
    assert code == 0 and out.strip() == "1 - q^-2*x0^2"
    code, out, _ = run(capsys, "reduce", "--algebra", "Ttheta2", "--expr", "u2*u1*u2'")
    assert out.strip() == "L12^-1*u1"


def test_reduce_unknown_algebra(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["reduce", "--algebra", "Nope", "--expr", "x"])
    assert exc.value.code == 2
    assert "--algebra" in capsys.readouterr().err


def test_trace_exact_and_numeric(capsys):
    code, out, _ = run(capsys, "trace", "--rep", "even+", "--n", "2", "--expr", "x0")
    assert code == 0 and out.strip() == "1/(1-q^-1)^2"
    code, out, _ = run(capsys, "trace", "--rep", "even+", "--n", "1", "--expr", "x0", "--numeric", "--cutoff", "40")
    value = float(out.split()[0])
    bound = float(out.split("tail bound ")[1].split(",")[0])
    # the bound is printed to four significant figures
    assert abs(value - 2.0) <= bound * (1 + 1e-3) + 1e-15


def test_trace_of_a_non_trace_class_operator_fails(capsys):
    code, _, err = run(capsys, "trace", "--rep", "even+", "--n", "1", "--expr", "1")
    assert code == 1 and "NotTraceClass" in err
    code, _, err = run(capsys, "trace", "--rep", "odd-fourier", "--n", "1", "--expr", "x1*x1'")
    assert code == 1


def test_chern_json(capsys):
    code, out, _ = run(capsys, "chern", "--object", "s4-e", "--degree", "1", "--format", "json")
    payload = json.loads(out)
    assert code == 0 and payload["zero"] and payload["terms"] == 0
    code, out, _ = run(capsys, "chern", "--object", "theta-u", "--n", "2", "--degree", "1", "--format", "json")
    assert not json.loads(out)["zero"]


def test_chern_text(capsys):
    code, out, _ = run(capsys, "chern", "--object", "e", "--n", "1", "--degree", "0")
    assert code == 0 and "x0" in out


def test_verify_json_schema(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "unipotents", "--n", "3", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["suite"] == "unipotents" and report["seed"] == 0 and report["status"] == "pass"
    assert report["checks"]
    for check in report["checks"]:
        assert set(check) >= {"name", "status", "witness"}
        assert check["status"] in ("pass", "fail", "skip")


def test_verify_is_deterministic_without_timing(capsys):
    argv = ["verify", "--suite", "poisson", "--seed", "3", "--format", "json", "--no-timing"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert all("elapsed_ms" not in c for c in json.loads(first)["checks"])


def test_verify_twist_lemmas_with_seed(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "twist-lemmas", "--seed", "7")
    assert code == 0


def test_clifford_alias():
    assert run_suite("clifford", n=2).status == "pass"


def test_unknown_suite_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "bogus"])
    assert exc.value.code == 2
    assert "--suite" in capsys.readouterr().err


def test_out_writes_a_file(tmp_path, capsys):
    target = tmp_path / "pairing.json"
    code, out, _ = run(capsys, "pairing", "--n", "3", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["matrix"] == [[1, 4], [0, -1]]


def test_algebra_lookup():
    assert algebra_by_name("Sq3").name
    assert algebra_by_name("S4theta").has_gen("alpha")
    assert algebra_by_name("Cliff2").has_gen("G2")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ncspheres", "pairing", "--n", "1", "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["matrix"] == [[1, 1], [0, -1]]
