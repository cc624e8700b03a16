"""Command-line surface: dispatch, report schema, exit codes, golden tables."""

import json
import os

import pytest

from lctlab.cli import emit_golden_tables, infer_nvars, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_infer_nvars():
    assert infer_nvars("x^3 + y^3") == 2
    assert infer_nvars("x1*x4 - x2*x3") == 4
    assert infer_nvars("w^2") == 4
    assert infer_nvars("3") == 1


def test_lct_diagonal_prints_value_and_json(capsys):
    code, out, _ = run(capsys, "lct", "diagonal", "--n", "2", "--d", "5")
    assert code == 0
    assert out.splitlines()[0] == "2/5"
    report = json.loads("\n".join(out.splitlines()[1:]))
    assert report["schema"] == "lct-lab/1"
    assert report["results"][0]["lct_fJ2"] == "2/5"
    assert report["results"][0]["provenance"] == "reference"
    assert "seed" in report["config"]


def test_lct_diagonal_usage_error(capsys):
    code, _, err = run(capsys, "lct", "diagonal", "--n", "0", "--d", "5")
    assert code == 2
    assert "usage error" in err


def test_unknown_subcommand_exits_2(capsys):
    assert main(["no-such-command"]) == 2


def test_lct_det_and_monomial(capsys):
    code, out, _ = run(capsys, "lct", "det", "--n", "4")
    assert code == 0 and out.splitlines()[0] == "2"
    code, out, _ = run(capsys, "lct", "monomial", "--ideal", "x^3,y^3")
    assert code == 0 and out.splitlines()[0] == "2/3"


def test_jets_json_fields(capsys):
    code, out, _ = run(
        capsys, "jets", "count", "--ideal", "x1*x4-x2*x3", "--p", "3", "--m", "1", "--e", "1"
    )
    assert code == 0
    rep = json.loads(out)
    row = rep["results"][0]
    assert row["p"] == 3 and row["m"] == 1 and row["e"] == 1
    assert row["count"] == 3**4 * 33
    assert "density" in row


def test_budget_exit_code(capsys):
    code, _, err = run(
        capsys,
        "--budget", "100",
        "jets", "count", "--ideal", "x1*x4-x2*x3", "--p", "5", "--m", "2", "--e", "1",
    )
    assert code == 3
    assert "budget" in err


def test_check_failure_exit_code(capsys):
    # x is not in the Jacobian-square ideal of x^3
    code, _, err = run(
        capsys, "tougeron", "--poly", "x^3", "--g", "x", "--order", "8"
    )
    assert code == 1
    assert "check failed" in err


def test_tougeron_roundtrip(capsys):
    code, out, _ = run(
        capsys, "tougeron", "--poly", "x^3", "--g", "x^4", "--order", "10"
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["results"][0]["verified"] is True


def test_morsify_cli(capsys):
    code, out, _ = run(capsys, "morsify", "--poly", "x^2 + x*y^2", "--order", "8")
    assert code == 0
    rep = json.loads(out)
    assert rep["results"][0]["diag_coeffs"] == ["1"]
    assert rep["results"][0]["residual"] == "-1/4*x2^4"


def test_milnor_cli(capsys):
    code, out, _ = run(capsys, "milnor", "--poly", "x^3 + y^3")
    assert code == 0
    assert out.splitlines()[0] == "4"


def test_expsum_cli(capsys):
    code, out, _ = run(capsys, "expsum", "--poly", "x^2", "--p", "5", "--m", "2")
    assert code == 0
    row = json.loads(out)["results"][0]
    assert abs(float(row["abs"]) - 0.2) < 1e-9
    assert row["sigma_m"] is not None


def test_decay_cli_tsv(capsys):
    code, out, _ = run(
        capsys,
        "--format", "tsv",
        "decay", "--poly", "x^2", "--p", "11", "--mmax", "2", "--lct", "1/2",
    )
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0].split("\t")[:3] == ["p", "m", "re"]
    assert len(lines) == 3  # header plus two levels


def test_igusa_cli(capsys):
    code, out, _ = run(
        capsys, "igusa-check", "--poly", "x^2", "--p", "7", "--m", "2", "--z", "x"
    )
    assert code == 0
    checks = json.loads(out)["results"][0]["checks"]
    assert checks["efz1"] is True and checks["efzj"] is True


def test_nk_cli(capsys):
    code, out, _ = run(capsys, "nk", "--poly", "x^2", "--p", "5", "--k", "2")
    assert code == 0
    assert json.loads(out)["results"][0]["nk"] == 5


def test_check_suites(capsys):
    code, out, _ = run(capsys, "check", "thmB", "--grid", "4")
    assert code == 0
    rows = json.loads(out)["results"]
    assert all(r["consistent"] for r in rows)
    code, out, _ = run(capsys, "check", "corD")
    assert code == 0
    rows = json.loads(out)["results"]
    assert len(rows) == 10
    assert all(r["equal"] for r in rows if not r["skipped"])
    code, out, _ = run(capsys, "check", "milnor")
    assert code == 0


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--cases", "3", "--seed", "99")
    assert code == 0


def test_golden_tables_stable(tmp_path):
    d1 = tmp_path / "g1"
    d2 = tmp_path / "g2"
    emit_golden_tables(str(d1))
    emit_golden_tables(str(d2))
    names = sorted(os.listdir(d1))
    assert names == [
        "determinantal.tsv",
        "diagonal_lct_grid.tsv",
        "expsum_profiles.tsv",
        "milnor_grid.tsv",
        "yano_roots.tsv",
    ]
    for name in names:
        b1 = (d1 / name).read_bytes()
        b2 = (d2 / name).read_bytes()
        assert b1 == b2, name
    grid = (d1 / "diagonal_lct_grid.tsv").read_text().splitlines()
    assert "n=5\td=3\tlct_fJ2=3/2\talpha=5/3\tstrict=true" in "\n".join(grid)


def test_env_budget(capsys, monkeypatch):
    monkeypatch.setenv("LCTLAB_BUDGET", "100")
    code, _, err = run(
        capsys, "jets", "count", "--ideal", "x1*x4-x2*x3", "--p", "5", "--m", "2", "--e", "1"
    )
    assert code == 3
