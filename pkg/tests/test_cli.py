import json

import pytest

from hughes1d import cli
from hughes1d.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from hughes1d.scenario import read_text as open_bundled


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    f = tmp_path / name
    f.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(f)


def test_validate_bundled(capsys):
    code, out, _ = run(capsys, "validate", "--scenario", "two_blocks")
    assert code == EXIT_OK and "FAIL" not in out


def test_validate_reports_density_above_max(capsys, tmp_path):
    f = write(tmp_path, "hi.scenario", {"schema_version": 1, "model": {}, "datum": {"blocks": [[0, 0.5, 1.5]]}})
    code, out, _ = run(capsys, "validate", "--scenario", f)
    assert code == EXIT_USAGE and "density exceeds rho_max" in out


def test_validate_reports_overlap(capsys, tmp_path):
    f = write(tmp_path, "ov.scenario",
              {"schema_version": 1, "model": {}, "datum": {"blocks": [[0, 0.5, 0.5], [0.2, 0.7, 0.5]]}})
    code, out, _ = run(capsys, "validate", "--scenario", f)
    assert code == EXIT_USAGE and "overlapping" in out


def test_parse_error_line_col(capsys, tmp_path):
    f = write(tmp_path, "bad.scenario", '{\n "schema_version": 1\n "model": {}\n}')
    code, _, err = run(capsys, "validate", "--scenario", f)
    assert code == EXIT_USAGE and f"{f}:3:2:" in err


def test_simulate_writes_trajectory(capsys, tmp_path):
    out_csv = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "simulate", "--scenario", "two_blocks", "--out", str(out_csv),
                       "--particles", "100", "--seedless")
    assert code == EXIT_OK
    s = json.loads(out)
    assert s["evacuated"] and s["T_mic"] > 0 and s["crossings"] >= 0
    assert out_csv.read_text().startswith("t,x0,x1")


def test_simulate_widened_crossings(capsys, tmp_path):
    obj = json.loads(open_bundled("widened_block"))
    obj["datum"]["delta"] = 0.12
    code, out, _ = run(capsys, "simulate", "--scenario", write(tmp_path, "w.scenario", obj))
    assert code == EXIT_OK and json.loads(out)["crossings"] >= 1


def test_simulate_zero_mass(capsys, tmp_path):
    f = write(tmp_path, "z.scenario", {"schema_version": 1, "model": {}, "datum": {"blocks": []}})
    code, _, err = run(capsys, "simulate", "--scenario", f)
    assert code == EXIT_USAGE and "zero-mass" in err


def test_sweep_delta_table(capsys, tmp_path):
    out_csv = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sweep", "--scenario", "shifted_two_blocks", "--param", "delta",
                       "--from", "0", "--to", "0.1", "--step", "0.01", "--out", str(out_csv), "--particles", "200")
    assert code == EXIT_OK
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "param,T_mic,crossings,evacuated" and len(lines) == 12
    assert json.loads(out)["rows"] == 11


def test_sweep_jobs_do_not_change_output(capsys, tmp_path):
    outs = []
    for jobs in ("1", "2"):
        f = tmp_path / f"a{jobs}.csv"
        run(capsys, "sweep", "--scenario", "two_blocks", "--param", "alpha", "--from", "0", "--to", "3",
            "--step", "1", "--jobs", jobs, "--out", str(f), "--particles", "60")
        outs.append(f.read_text())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("step", ["0", "-0.1"])
def test_sweep_bad_step(capsys, step):
    code, _, _ = run(capsys, "sweep", "--scenario", "two_blocks", "--param", "alpha",
                     "--from", "0", "--to", "1", "--step", step)
    assert code == EXIT_USAGE


def test_sweep_delta_needs_family(capsys):
    code, _, err = run(capsys, "sweep", "--scenario", "two_blocks", "--param", "delta",
                       "--from", "0", "--to", "0.1", "--step", "0.05")
    assert code == EXIT_USAGE and "family" in err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["check", "nonsense", "--scenario", "two_blocks"])
    assert exc.value.code == EXIT_USAGE


def test_check_dotxi_pass(capsys):
    code, out, _ = run(capsys, "check", "dotxi", "--scenario", "exit_blocks")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["pass"] and rep["in_scope"]


def test_check_stability_out_of_scope(capsys):
    code, out, _ = run(capsys, "check", "stability", "--scenario", "two_blocks", "--t-eval", "2.0",
                       "--particles", "100")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["flag"] == "out of theorem scope"


def test_check_restart_table(capsys):
    code, out, _ = run(capsys, "check", "restart", "--scenario", "two_blocks", "--t0", "0.2")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["decreasing"] and len(rep["l1"]) == 3


def test_check_failure_exit_two(capsys, monkeypatch):
    monkeypatch.setattr(cli, "DOTXI_TOL", 0.0)
    code, out, _ = run(capsys, "check", "dotxi", "--scenario", "uneven_exit_blocks", "--particles", "100")
    assert code == EXIT_NUMERIC and not json.loads(out)["pass"]


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == EXIT_OK and "two_blocks" in out.split()
