import json
import subprocess
import sys

import pytest

from grrcensus.cli import (EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, RunConfig, UsageError, main,
                           parse_set, select_normals)
from grrcensus.parse import parse_group_spec


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def strip_header(doc):
    return {k: v for k, v in doc.items() if k != "header"}


def test_group_info(capsys):
    code, doc = run_json(capsys, ["group-info", "Q8xC2"])
    assert code == EXIT_OK
    assert doc["order"] == 16 and doc["generalized_dicyclic"] and doc["excluded_family"]
    assert doc["automorphism_group_order"] == 192


def test_grr_check_accepts_hex_and_elements(capsys):
    G = parse_group_spec("D6")
    code, a = run_json(capsys, ["grr-check", "D6", "--set", "1,5,6,7,9"])
    assert code == EXIT_OK and parse_set(G, "0x2e2").elements() == [1, 5, 6, 7, 9]
    code, b = run_json(capsys, ["grr-check", "D6", "--set", "0x2e2"])
    assert strip_header(a)["automorphism_group_order"] == b["automorphism_group_order"] == 12
    assert a["is_grr"] and b["set_hex"] == "2e2"
    code, c = run_json(capsys, ["grr-check", "D6", "--set", ""])
    assert not c["is_grr"] and c["automorphism_group_order"] > 12


def test_census_d3_reports_no_unresolved_sets(capsys):
    code, doc = run_json(capsys, ["census", "D3"])
    assert code == EXIT_OK and doc["all_bounds_hold"]
    assert [r["counts"]["u_N"] for r in doc["reports"]] == [0]
    holds = [b["holds"] for r in doc["reports"] for b in r["bounds"]]
    assert False not in holds and None in holds


def test_census_output_is_deterministic(capsys, tmp_path):
    runs = []
    for jobs in ("1", "2"):
        out = tmp_path / f"r{jobs}.json"
        assert main(["census", "D4", "--jobs", jobs, "--out", str(out)]) == EXIT_OK
        doc = json.loads(out.read_text())
        doc["config"].pop("jobs")
        runs.append(json.dumps(strip_header(doc), sort_keys=True))
    assert runs[0] == runs[1]


def test_census_csv(capsys):
    code, out = run_json(capsys, ["census", "D4", "--normal", "0", "--format", "csv"])
    lines = out.strip().splitlines()
    assert code == EXIT_OK and lines[0].startswith("group,order,normal_subgroup")
    assert len(lines) > 5


def test_census_normal_selectors():
    G = parse_group_spec("D4")
    assert len(select_normals(G, "all")) == 4
    assert select_normals(G, "gens=2")[0].elements() == [0, 2]
    with pytest.raises(UsageError):
        select_normals(G, "gens=4")  # a reflection generates a non-normal subgroup
    with pytest.raises(UsageError):
        select_normals(G, "9")


def test_census_checkpoint_resume(tmp_path, capsys):
    ck = tmp_path / "ck.json"
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["census", "D5", "--checkpoint", str(ck), "--out", str(a)]) == EXIT_OK
    assert main(["census", "D5", "--checkpoint", str(ck), "--out", str(b)]) == EXIT_OK
    counts = [json.loads(p.read_text())["reports"][0]["counts"] for p in (a, b)]
    assert counts[0] == counts[1]


@pytest.mark.parametrize("argv", [
    ["census", "C70"],
    ["group-info", "C70"],
    ["census", "Dic(C2)"],
    ["census", "Cx"],
    ["census", "EA4", "--max-c", "12"],
    ["census", "C5"],
    ["nonsense"],
    ["verify-lemma", "nosuch"],
    ["grr-check", "C5", "--set", "1"],
    ["density-report", "--orders", "5..3"],
])
def test_usage_and_budget_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_budget_env_variable(monkeypatch, capsys):
    monkeypatch.setenv("GRR_CENSUS_BUDGET_C", "4")
    assert main(["census", "D3"]) == EXIT_USAGE
    assert "budget" in capsys.readouterr().err
    monkeypatch.setenv("GRR_CENSUS_BUDGET_C", "8")
    assert main(["census", "D3"]) == EXIT_OK


def test_verify_lemma_pass_and_violation(capsys, tmp_path):
    code, doc = run_json(capsys, ["verify-lemma", "icecream", "--max-order", "12"])
    assert code == EXIT_OK and doc["violations"] == []
    code, doc = run_json(capsys, ["verify-lemma", "psi", "--max-order", "12"])
    assert code == EXIT_VIOLATION and len(doc["violations"]) == 4
    out = tmp_path / "psi.csv"
    assert main(["verify-lemma", "psi", "--max-order", "12", "--format", "csv", "--out", str(out)]) \
        == EXIT_VIOLATION
    assert out.read_text().count("VIOLATION") == 4


def test_verify_lemma_records_seed(capsys):
    code, a = run_json(capsys, ["verify-lemma", "trichotomy", "--seed", "5"])
    code, b = run_json(capsys, ["verify-lemma", "trichotomy", "--seed", "5"])
    assert a["config"]["seed"] == 5
    assert json.dumps(strip_header(a)) == json.dumps(strip_header(b))


def test_density_report(capsys):
    code, doc = run_json(capsys, ["density-report", "--orders", "6..7"])
    assert code == EXIT_OK
    assert {r["group"]: r["grr_count"] for r in doc["rows"]} == {"C6": 0, "D3": 0, "C7": 0}


def test_exit_code_tracks_failing_records(monkeypatch, capsys):
    from grrcensus import census, cli

    real = census.check_bounds

    def broken(G, N, counts):
        recs = real(G, N, counts)
        return [r if r.bound_id != "unresolved_empty" else
                census.BoundRecord(r.bound_id, 1, 0.0, float("-inf"), float("-inf"), False, False)
                for r in recs]
    monkeypatch.setattr(cli, "check_bounds", broken)
    code, doc = run_json(capsys, ["census", "D3"])
    assert code == EXIT_VIOLATION
    assert any(b["holds"] is False for r in doc["reports"] for b in r["bounds"])


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("census", worker_count=0)
    with pytest.raises(UsageError):
        RunConfig("census", seed=-1)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "grrcensus", "group-info", "C4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["order"] == 4
