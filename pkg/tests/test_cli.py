import csv
import io
import json

import pytest

from amtlab.cli import SCHEMA_VERSION, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constants_json_to_stdout(capsys):
    code, out, err = run(capsys, "constants", "--m", "1", "--out", "-")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["result"]["beta_star"]["float"] == pytest.approx(12.566370614359172, rel=1e-15)
    assert doc["manifest"]["parameters"] == {"format": "json", "m": 1, "tol": None}
    # manifest with timing goes to stderr when writing to stdout
    side = json.loads(err.strip().splitlines()[-1])
    assert side["command"] == "constants" and "duration_s" in side


def test_claims_carry_tolerance_and_anchor(capsys):
    _, out, _ = run(capsys, "constants", "--m", "2")
    for claim in json.loads(out)["result"]["checks"]:
        assert {"claim", "value", "tol", "anchor"} <= set(claim)


@pytest.mark.parametrize("argv", [["constants", "--m", "0"], ["constants", "--bogus"], ["nope"], [], ["extremal", "--beta-frac", "1.5"]])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "usage" in err


def test_alpha_above_eigenvalue_is_usage_error(capsys):
    code, _, err = run(capsys, "green", "--alpha", "100")
    assert code == 2 and "lambda_1" in err


def test_unwritable_path_exits_1(capsys, tmp_path):
    code, _, err = run(capsys, "constants", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 1 and "cannot write" in err


def test_bubble_csv_header(capsys):
    code, out, _ = run(capsys, "bubble", "--m", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0][:3] == ["r", "eta0", "laplacian_level_1_2"]
    assert len(rows) == 1 + 65


def test_sidecar_manifest_and_determinism(tmp_path):
    paths = [tmp_path / f"g{k}.json" for k in range(2)]
    for p in paths:
        assert main(["green", "--m", "2", "--alpha", "5", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    side = json.loads((tmp_path / "g0.json.manifest.json").read_text())
    assert side["outputs"] == [str(paths[0])]
    assert side["parameters"]["delta"] == 0.01


@pytest.mark.parametrize("argv", [["testfn", "--eps", "1e-3"], ["extremal", "--beta-frac", "0.5"], ["demo-divergence"]])
def test_subcommands_succeed(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert json.loads(out)["manifest"]["command"] == argv[0]


def test_verify_quick(capsys):
    code, out, err = run(capsys, "verify-all", "--m", "1", "--quick")
    assert code == 0
    assert json.loads(out)["result"]["all_passed"]
    assert err.count("[PASS]") == 13 and "[SKIP] criterion 11" in err
