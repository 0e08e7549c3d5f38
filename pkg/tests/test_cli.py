import json

import pytest

from steplab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip()
    payload = json.loads(out.splitlines()[-1]) if out else None
    return code, payload


def test_verify_etm_pass(tmp_path, capsys):
    code, payload = run_cli(
        capsys, "verify-etm", "--program", "factorial.incremental",
        "--n-max", "8", "--out", str(tmp_path),
    )
    assert code == 0
    assert payload["verdict"] == "pass"
    assert set(payload) == {"experiment", "target", "range", "verdict", "details"}
    csv = (tmp_path / "factorial.incremental.profiles.csv").read_text()
    assert csv.startswith("n,i,k_n_i,t_i,total\n")


def test_verify_etm_fail_names_violation(tmp_path, capsys):
    code, payload = run_cli(
        capsys, "verify-etm", "--program", "factorial.direct",
        "--n-max", "4", "--out", str(tmp_path),
    )
    assert code == 1
    assert payload["verdict"] == "fail"
    assert "no-commit-witness" in payload["details"][0]


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["definitely-not-a-command"])
    assert err.value.code == 2


def test_unknown_program_exits_2(tmp_path, capsys):
    code, _ = run_cli(
        capsys, "verify-etm", "--program", "no.such", "--out", str(tmp_path)
    )
    assert code == 2


def test_measure_and_fit(tmp_path, capsys):
    code, payload = run_cli(
        capsys, "measure", "--machine", "palindrome2",
        "--lengths", "16:256", "--out", str(tmp_path),
    )
    assert code == 0
    code, payload = run_cli(
        capsys, "fit", "--series", str(tmp_path / "palindrome2.csv"),
        "--out", str(tmp_path),
    )
    assert code == 0
    fit = json.loads((tmp_path / "palindrome2.fit.json").read_text())
    assert 0.85 <= fit["exponent"] <= 1.2


def test_measure_program_range(tmp_path, capsys):
    code, payload = run_cli(
        capsys, "measure", "--program", "pow3.incremental",
        "--n-range", "4:32", "--out", str(tmp_path),
    )
    assert code == 0
    assert (tmp_path / "pow3.incremental.csv").exists()


def test_verify_approx_and_ca(tmp_path, capsys):
    code, payload = run_cli(
        capsys, "verify-approx", "--witness", "identity-factorial",
        "--n-max", "6", "--out", str(tmp_path),
    )
    assert code == 0
    code, payload = run_cli(
        capsys, "verify-ca", "--witness", "factorial~factorial2",
        "--n-max", "6", "--out", str(tmp_path),
    )
    assert code == 0


def test_verify_approx_from_manifest(tmp_path, capsys):
    manifest = tmp_path / "w.witness"
    manifest.write_text(
        "witness from-file\nfunction factorial\nmachine factorial2.incremental\n"
        "helper helper.halve\nbound c*n*log 8\nrho record-i\n"
    )
    code, payload = run_cli(
        capsys, "verify-approx", "--manifest", str(manifest),
        "--n-max", "6", "--out", str(tmp_path),
    )
    assert code == 0
    assert payload["target"] == "from-file"


def test_falsify_subcommand(tmp_path, capsys):
    code, payload = run_cli(
        capsys, "falsify", "--function", "interleave_factorial",
        "--challenger", "interleave_factorial.even_shortcut",
        "--n-range", "4:24", "--out", str(tmp_path),
    )
    assert code == 0
    assert "strong-CIR falsified on range" in payload["details"][0]


def test_sum_bound_subcommand(tmp_path, capsys):
    code, payload = run_cli(
        capsys, "appendixB", "--form", "c*n", "--n-max", "500", "--out", str(tmp_path)
    )
    assert code == 0
    code, payload = run_cli(
        capsys, "appendixB", "--form", "c*log", "--n-max", "500", "--out", str(tmp_path)
    )
    assert code == 1
    assert "convexity" in payload["details"][0]


def test_config_file_defaults_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("n_max=5\nout=%s\n" % tmp_path)
    code, payload = run_cli(
        capsys, "verify-etm", "--program", "factorial.incremental",
        "--config", str(cfg),
    )
    assert code == 0
    assert payload["range"] == [1, 5]
    code, payload = run_cli(
        capsys, "verify-etm", "--program", "factorial.incremental",
        "--config", str(cfg), "--n-max", "3",
    )
    assert payload["range"] == [1, 3]


def test_parallel_measure_matches_sequential(tmp_path, capsys):
    outs = {}
    for jobs, sub in (("1", "seq"), ("3", "par")):
        out = tmp_path / sub
        code, _ = run_cli(
            capsys, "measure", "--machine", "palindrome2",
            "--lengths", "16:128", "--jobs", jobs, "--out", str(out),
        )
        assert code == 0
        outs[sub] = (out / "palindrome2.csv").read_bytes()
    assert outs["seq"] == outs["par"]


def test_reproducible_outputs(tmp_path, capsys):
    paths = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        run_cli(
            capsys, "measure", "--program", "factorial.incremental",
            "--n-range", "4:32", "--out", str(out),
        )
        run_cli(
            capsys, "verify-approx", "--witness", "doubled-factorial",
            "--n-max", "6", "--out", str(out),
        )
        paths.append(out)
    for name in ("factorial.incremental.csv", "doubled-factorial.approx.json"):
        assert (paths[0] / name).read_bytes() == (paths[1] / name).read_bytes()
