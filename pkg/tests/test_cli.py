from __future__ import annotations

import json
import subprocess
import sys

import pytest

from causetlab.cli import load_schema, main

LADDER_HALF = '{"kind": "ladder", "weight": "1/2"}'


def run_cli(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def files_of(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_count_linext_ladder(capsys, tmp_path):
    status, out, _ = run_cli(capsys, "count-linext", "--model", "ladder", "--n", "10", "--out", str(tmp_path))
    # extensions of the n-ladder are Fibonacci numbers: 1, 2, 3, 5, ... so n=10 gives 89
    assert status == 0 and out.strip() == "89"
    body = json.loads((tmp_path / "count.json").read_text())
    assert body["extensions"] == "89"


def test_count_linext_poset_file(capsys, tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("n=3\n1<3\n2<3\n")
    status, out, _ = run_cli(capsys, "count-linext", "--poset", str(path))
    assert status == 0 and out.strip() == "2"


def test_check_invariance_half_ladder_fails(capsys, tmp_path):
    status, out, _ = run_cli(capsys, "check-invariance", "--kernel", LADDER_HALF, "--k-max", "4",
                             "--out", str(tmp_path))
    assert status == 1
    report = json.loads((tmp_path / "report.json").read_text())
    w = report["reports"][0]["witnesses"][0]
    assert (w["lhs"], w["rhs"]) == ("1/4", "1/2")
    assert "fail" in out


def test_check_invariance_phi_ladder_passes(capsys):
    status, _, _ = run_cli(capsys, "check-invariance", "--kernel", '{"kind": "ladder"}', "--k-max", "6")
    assert status == 0


def test_simulate_is_deterministic(capsys, tmp_path):
    args = ["simulate", "--kernel", '{"kind": "rgo", "p": 0.5}', "--n", "20", "--seed", "7"]
    assert run_cli(capsys, *args, "--out", str(tmp_path / "a"))[0] == 0
    assert run_cli(capsys, *args, "--out", str(tmp_path / "b"))[0] == 0
    a, b = files_of(tmp_path / "a"), files_of(tmp_path / "b")
    assert a == b
    text = a["trajectory.txt"].decode()
    assert text.startswith("# causetlab trajectory\n# seed=7\n")
    assert len([line for line in text.splitlines() if line and line[0].isdigit()]) == 20


def test_simulate_many_jobs_match(capsys, tmp_path):
    args = ["simulate", "--kernel", '{"kind": "csg", "t": [1, "1/2"]}', "--n", "8", "--count", "5"]
    run_cli(capsys, *args, "--out", str(tmp_path / "a"))
    run_cli(capsys, *args, "--out", str(tmp_path / "b"), "--jobs", "3")
    assert files_of(tmp_path / "a") == files_of(tmp_path / "b")


def test_config_file_and_manifest(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"task": "check-dlr", "seed": 3, "kernel": {"kind": "two-chains", "q": "1/3"},
                               "params": {"k": [1, 2], "stem_max": 3}}))
    status, out, _ = run_cli(capsys, "check-dlr", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert status == 0 and "pass" in out
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["seed"] == 3 and manifest["status"] == 0
    assert set(manifest["files"]) == {"dlr.json"}


def test_bad_config_reports_line(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n  "task": "simulate",\n  "kernel": {\n    "kind": "rgo",\n    "p": 3\n  }\n}\n')
    status, _, err = run_cli(capsys, "simulate", "--config", str(cfg))
    assert status == 2
    assert f"{cfg}:5: kernel/p" in err


def test_json_syntax_error(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n  "task": "simulate",\n  "seed": ,\n}\n')
    status, _, err = run_cli(capsys, "simulate", "--config", str(cfg))
    assert status == 2 and f"{cfg}:3:" in err


def test_task_mismatch_and_missing_kernel(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"task": "simulate"}')
    assert run_cli(capsys, "check-dlr", "--config", str(cfg))[0] == 2
    assert run_cli(capsys, "simulate")[0] == 2


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-task"])
    assert exc.value.code == 2


def test_set_override(capsys):
    status, out, _ = run_cli(capsys, "diagnose", "--set", "probe=polya", "--set", "n_traj=2000",
                             "--set", "traj_len=200")
    assert status == 0 and "polya-limit: pass" in out
    status, _, _ = run_cli(capsys, "diagnose", "--probe", "polya", "--n-traj", "2000", "--traj-len", "200",
                           "--q", "0.3")
    assert status == 1


def test_diagnose_trace_and_persistence(capsys, tmp_path):
    status, out, _ = run_cli(capsys, "diagnose", "--kernel", '{"kind": "ladder"}', "--set", 'event={"stem": [1]}',
                             "--n-max", "18", "--out", str(tmp_path))
    assert status == 0
    last = (tmp_path / "trace.csv").read_text().splitlines()[-1].split(",")
    assert last[0] == "18" and float(last[3]) < 1e-3
    status, out, _ = run_cli(capsys, "diagnose", "--kernel", '{"kind": "iid-antichain"}', "--probe", "persistence",
                             "--n", "128", "--k", "2", "--out", str(tmp_path))
    assert status == 0 and "0 of 2" in out


def test_diagnose_structure(capsys, tmp_path):
    kernel = '{"kind": "chain-with-marks", "p": ["1", "1/2", "1/4"]}'
    status, out, _ = run_cli(capsys, "diagnose", "--kernel", kernel, "--probe", "structure", "--samples", "2000",
                             "--out", str(tmp_path))
    assert status == 0
    assert json.loads((tmp_path / "structure.json").read_text())["verdict"] == "pass"


def test_verify_bounds_small(capsys, tmp_path):
    status, out, _ = run_cli(capsys, "verify-bounds", "--max-n", "4", "--random-count", "50", "--random-n", "7",
                             "--out", str(tmp_path))
    assert status == 0
    body = json.loads((tmp_path / "bounds.json").read_text())
    assert [s["suite"] for s in body["suites"]] == ["fishburn", "correlation", "stanley", "lowdownset", "qformula"]
    assert all(s["violations"] == 0 for s in body["suites"])
    assert (tmp_path / "margins.csv").read_text().startswith("suite,instance,lhs,rhs,margin\n")


def test_binned_invariance_via_cli(capsys, tmp_path):
    args = ["check-invariance", "--kernel", '{"kind": "rgo", "p": 0.5}', "--samples", "3000", "--event-k", "2"]
    status, _, _ = run_cli(capsys, *args, "--out", str(tmp_path / "a"))
    assert status == 0
    run_cli(capsys, *args, "--out", str(tmp_path / "b"), "--jobs", "2")
    assert files_of(tmp_path / "a") == files_of(tmp_path / "b")


def test_schema_is_valid():
    import jsonschema

    jsonschema.Draft202012Validator.check_schema(load_schema())


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "causetlab.cli", "count-linext", "--model", "chains:2,2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "6"
