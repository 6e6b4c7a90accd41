import json
import subprocess
import sys

import numpy as np
import pytest

from fewqma import cli
from fewqma.cli import ConfigError, ExperimentConfig


def run_main(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_wall(text):
    obj = json.loads(text)
    obj.pop("wall_time")
    return obj


def test_claims_default_passes(capsys):
    code, out, _ = run_main(["claims"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == 1 and rep["summary"]["passed"]
    assert rep["config"]["K"] is None and rep["config"]["k"] == 2
    assert all(c["value"] <= 1e-8 for c in rep["checks"] if c["name"] != "alt_wd_rank_one")
    assert all(c["anchor"] for c in rep["checks"])


def test_claims_alt_trace_zero_when_t_exceeds_K(capsys):
    code, out, _ = run_main(["claims", "--K", "2", "--t", "3"], capsys)
    rep = json.loads(out)
    alt = [c for c in rep["checks"] if c["name"] == "alt_trace"][0]
    assert code == 0 and alt["trace"] == 0.0 and alt["pass"]


def test_claims_negative_control(capsys):
    code, out, _ = run_main(["claims", "--inject-fault"], capsys)
    assert code == 1
    assert json.loads(out)["summary"]["failed"] > 0


def test_reduce_yes_and_no(capsys):
    code, out, _ = run_main(["reduce", "--d", "2", "--q", "3", "--r", "8"], capsys)
    rep = json.loads(out)
    assert code == 0
    yes = [e for e in rep["trace"] if e["kind"] == "yes"]
    no = [e for e in rep["trace"] if e["kind"] == "no"]
    assert yes[-1]["t"] == 2 and yes[-1]["verdict"] == "yes" and not yes[-1]["observational"]
    assert all(e["observational"] for e in yes[:-1])
    assert [e["verdict"] for e in no] == ["no"] * 3


def test_reduce_d1_accepts_at_first_query(capsys):
    code, out, _ = run_main(["reduce", "--d", "1", "--kind", "yes"], capsys)
    rep = json.loads(out)
    assert code == 0 and [e["t"] for e in rep["trace"]] == [1]


def test_spectrum_identity_file(tmp_path, capsys):
    path = tmp_path / "id.json"
    path.write_text(json.dumps({"k": 1, "m": 1, "v": [[float(x), 0.0] for x in np.eye(4).ravel()]}))
    code, out, _ = run_main(["spectrum", "--verifier", str(path), "--t", "1"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["data"]["pi_x"] == pytest.approx([1, 0, 0, 0], abs=1e-12)


def test_gen_then_spectrum_recovers_declared_profile(tmp_path, capsys):
    path = tmp_path / "v.json"
    assert cli.main(["gen", "--kind", "yes", "--d", "2", "--out", str(path)]) == 0
    capsys.readouterr()
    code, out, _ = run_main(["spectrum", "--verifier", str(path), "--t", "2"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert any(c["name"] == "declared_profile" and c["pass"] for c in rep["checks"])
    assert len(rep["data"]["G_2"]) == 16


def test_malformed_verifier_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"k": 1}')
    code, _, err = run_main(["spectrum", "--verifier", str(path)], capsys)
    assert code == 2 and "malformed" in err
    path.write_text("nope")
    assert run_main(["spectrum", "--verifier", str(path)], capsys)[0] == 2
    assert run_main(["spectrum", "--verifier", str(tmp_path / "missing.json")], capsys)[0] == 2


@pytest.mark.parametrize(
    "args",
    [
        ["reduce", "--q", "5"],
        ["reduce", "--d", "4", "--q", "3"],
        ["claims", "--K", "4", "--t", "7"],
        ["claims", "--trials", "0"],
        ["gen", "--m", "0"],
        ["reduce", "--seed", "-1"],
    ],
)
def test_config_errors_exit_2(args, capsys):
    code, out, err = run_main(args, capsys)
    assert code == 2 and out == "" and err.startswith("fewqma ")


def test_validate_direct():
    with pytest.raises(ConfigError):
        ExperimentConfig("horn", tol=0.0).validate()
    ExperimentConfig("horn").validate()


def test_horn_small(capsys):
    code, out, _ = run_main(["horn", "--trials", "5", "--vector-trials", "3"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["summary"]["checks"] == 5 + 3 * 3


def test_csv_output(capsys):
    code, out, _ = run_main(["reduce", "--format", "csv", "--kind", "no"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("section,")
    assert any(line.startswith("trace,") for line in lines)


def test_reports_are_deterministic(capsys):
    a = run_main(["reduce", "--trials", "2", "--seed", "99"], capsys)[1]
    b = run_main(["reduce", "--trials", "2", "--seed", "99"], capsys)[1]
    assert strip_wall(a) == strip_wall(b)
    c = run_main(["reduce", "--trials", "2", "--seed", "100"], capsys)[1]
    assert strip_wall(a) != strip_wall(c)


def test_trial_streams_do_not_depend_on_trial_count(capsys):
    one = json.loads(run_main(["reduce", "--trials", "1", "--kind", "yes"], capsys)[1])
    three = json.loads(run_main(["reduce", "--trials", "3", "--kind", "yes"], capsys)[1])
    first = [e for e in three["trace"] if e["trial"] == 0]
    assert first == one["trace"]


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "fewqma", "claims", "--K", "3", "--d", "3", "--t", "2,3", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["summary"]["passed"]
