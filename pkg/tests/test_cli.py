import json

import pytest

from drinlog.cli import EXIT_FAIL, EXIT_MATH, EXIT_OK, EXIT_PARSE, main


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_functional_equation_job(capsys):
    code, report = run_cli(capsys, "--preset", "q2-wide", "--op", "verify_functional_equation", "--xi", "theta^3")
    assert code == EXIT_OK
    assert report["result"]["pass"] is True
    assert report["result"]["witnesses"]["member"] is True


def test_b_series_partition_count(capsys):
    code, report = run_cli(
        capsys, "--module", "2,(1+theta^-1)^4,theta^4", "--op", "b_series_direct", "--n", "3"
    )
    assert code == EXIT_OK
    assert report["result"]["partitions_count"] == 3


def test_malformed_kappa_exits_2(capsys):
    assert main(["--module", "1,theta^^2", "--op", "radius"]) == EXIT_PARSE
    assert main(["--module", "2,theta", "--op", "radius"]) == EXIT_PARSE
    assert main(["--field", "2,1,x,1", "--op", "radius"]) == EXIT_PARSE


def test_unknown_suite_and_op(capsys):
    assert main(["--suite", "nope"]) == EXIT_PARSE
    with pytest.raises(SystemExit) as exc:
        main(["--op", "nope"])
    assert exc.value.code == 2


def test_math_error_exits_3(capsys):
    code, report = run_cli(capsys, "--preset", "q2", "--op", "ext_log", "--xi", "theta^3")
    assert code == EXIT_MATH
    assert report["error"] == "NO_INTEGRAL_SLOPE"


def test_failed_verification_exits_1(capsys):
    # degree 40 is too short for q = 2 at precision 50
    code, report = run_cli(capsys, "--preset", "q2", "--op", "anderson", "--xi", "theta^-1", "--tdeg", "40")
    assert code == EXIT_FAIL
    assert report["pass"] is False


def test_reports_are_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["--preset", "q2", "--op", "kinfty_branch", "--xi", "theta+1", "--out", str(path)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_job_file_and_unknown_keys(tmp_path, capsys):
    good = tmp_path / "job.json"
    good.write_text(json.dumps({"module": "carlitz", "op": "partitions", "n": 4}))
    code, report = run_cli(capsys, "--job", str(good))
    assert code == EXIT_OK and report["result"]["count"] == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"op": "partitions", "colour": "red"}))
    assert main(["--job", str(bad)]) == EXIT_PARSE


def test_power_wrap(capsys):
    code, report = run_cli(capsys, "--module", "2,1+theta^-1,theta", "--power-wrap", "--op", "phi_j", "--n", "2")
    assert code == EXIT_OK
    assert report["module"]["r"] == 2


def test_rank_two_ext_log_needs_psi(capsys):
    assert main(["--module", "2,(1+theta^-1)^4,theta^4", "--op", "ext_log"]) == EXIT_PARSE


def test_psi_file_round_trip(tmp_path, capsys):
    code, report = run_cli(capsys, "--preset", "q2", "--op", "psi", "--tdeg", "64", "--prec", "40")
    assert code == EXIT_OK
    path = tmp_path / "psi.json"
    path.write_text(json.dumps(report["result"]["psi"]))
    code, report = run_cli(
        capsys, "--preset", "q2", "--op", "verify_inside_radius", "--xi", "theta^-1", "--psi", str(path), "--prec", "30"
    )
    assert code == EXIT_OK and report["pass"] is True


def test_identities_suite(capsys):
    code, report = run_cli(capsys, "--suite", "identities")
    assert code == EXIT_OK
    assert all(c["pass"] for c in report["checks"])
