import json

import pytest

from lagfrac.cli import main


def run_cli(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_eval_basis(tmp_path):
    assert run_cli(tmp_path, "eval-basis", "--alpha", "1", "--kmax", "2", "--grid-points", "5", "--svg") == 0
    lines = (tmp_path / "basis.csv").read_text().splitlines()
    assert lines[0] == "k,x,l,script_L,psi_at_sqrt_x"
    assert len(lines) == 1 + 3 * 5
    assert (tmp_path / "basis.svg").read_text().startswith("<svg")


def test_transform_fracint_conv_maximal(tmp_path):
    assert run_cli(tmp_path, "transform", "--degree", "4") == 0
    assert run_cli(tmp_path, "fracint", "--sigma", "0.5", "--grid-points", "10") == 0
    assert run_cli(tmp_path, "conv", "--grid-points", "4") == 0
    assert run_cli(tmp_path, "maximal", "--grid-points", "3") == 0
    for name in ("transform", "fracint", "conv", "maximal"):
        assert (tmp_path / f"{name}.csv").exists()


def test_kernel_bound(tmp_path, capsys):
    assert run_cli(tmp_path, "kernel-bound", "--alpha", "0", "--sigma", "0.5", "--grid-points", "30") == 0
    summary = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert summary["converged"] and summary["sup_ratio"] > 0


def test_verify_and_json_report(tmp_path):
    assert run_cli(tmp_path, "verify", "thm11", "--samples", "10", "--dump-rule") == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert len(report) == 1
    assert {"config", "sup_ratio", "attaining", "stability", "pass", "seconds"} <= set(report[0])
    assert (tmp_path / "rule_gauss_laguerre.csv").read_text().startswith("node,weight")


def test_verify_fail_exit_code(tmp_path):
    assert run_cli(tmp_path, "verify", "corollary12", "--sequence", "alternating") == 1


def test_multiplier_check(tmp_path):
    assert run_cli(tmp_path, "multiplier", "check") == 0


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("alpha=1\np=2\nsigma=0.5\nsamples=5\n")
    assert run_cli(tmp_path, "verify", "thm11", "--config", str(cfg), "--samples", "7") == 0
    report = json.loads((tmp_path / "report.json").read_text())[0]
    assert report["config"]["samples"] == 7 and report["config"]["alpha"] == 1.0


def test_csv_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["verify", "thm11", "--samples", "15", "--out", str(a)])
    main(["verify", "thm11", "--samples", "15", "--out", str(b)])
    assert (a / "thm11.csv").read_bytes() == (b / "thm11.csv").read_bytes()
    ja = json.loads((a / "report.json").read_text())
    jb = json.loads((b / "report.json").read_text())
    for r in ja + jb:
        r.pop("seconds")
    assert ja == jb


@pytest.mark.parametrize("args", [
    ["verify", "thm11", "--a", "0.5", "--alpha", "0", "--p", "2", "--sigma", "0.5"],
    ["verify", "thm31", "--a", "0.3", "--b", "-0.5"],
    ["verify", "thm11", "--p", "abc"],
    ["verify", "nothing"],
    ["bogus-command"],
])
def test_usage_errors_exit_2(tmp_path, args):
    try:
        code = run_cli(tmp_path, *args)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_bad_config_file_exit_2(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("wrong_key=1\n")
    assert run_cli(tmp_path, "verify", "thm11", "--config", str(cfg)) == 2
