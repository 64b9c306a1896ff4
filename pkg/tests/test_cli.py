"""End-to-end command-line behavior: pipelines, overrides, exit codes."""

import json
import subprocess
import sys

import pytest

from commutopt.cli import main
from commutopt.harness import read_rows


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def ring_run_config(tmp_path):
    return write_json(
        tmp_path / "run.json",
        {
            "method": "h1",
            "kind": "ring",
            "sizes": [6],
            "seeds": [0],
            "grid": "0:0.5:80",
        },
    )


def test_gen_run_plotdata_pipeline(tmp_path, capsys):
    gen_cfg = write_json(
        tmp_path / "gen.json",
        {"kind": "ring", "sizes": [6, 8], "count": 1, "name": "rings.ndjson"},
    )
    assert main(["gen", "--config", gen_cfg, "--out", str(tmp_path)]) == 0
    instances = tmp_path / "rings.ndjson"
    assert instances.exists()
    assert len(instances.read_text().splitlines()) == 2

    run_cfg = write_json(
        tmp_path / "run.json",
        {"instances_file": str(instances), "grid": "0:0.5:80"},
    )
    out_dir = tmp_path / "results"
    assert main(["run", "--config", run_cfg, "--out", str(out_dir)]) == 0
    captured = capsys.readouterr()
    assert "2/2 instances ok" in captured.out
    rows = read_rows(out_dir / "results.csv")
    assert len(rows) == 2 and all(r["status"] == "ok" for r in rows)

    assert (
        main(
            [
                "plotdata",
                "fig3-ring-saturation",
                str(out_dir / "results.csv"),
                "--out",
                str(tmp_path / "plots"),
            ]
        )
        == 0
    )
    tidy = read_rows(tmp_path / "plots" / "fig3-ring-saturation.csv")
    assert {r["group"] for r in tidy} >= {"h1", "qaoa-p1-constant"}


def test_run_exit_codes_for_config_problems(tmp_path, ring_run_config):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 1
    bad = write_json(tmp_path / "bad.json", {"method": "h1", "frobnicate": 1})
    assert main(["run", "--config", bad]) == 1
    notdict = tmp_path / "arr.json"
    notdict.write_text("[]")
    assert main(["run", "--config", str(notdict)]) == 1
    assert main(["run", "--config", ring_run_config, "--grid", "oops"]) == 1


def test_missing_subcommand_is_config_error(capsys):
    assert main([]) == 1
    assert "config error" in capsys.readouterr().err


def test_partial_instance_failure_exits_two(tmp_path, capsys):
    good = {
        "id": "ring-n6-s0",
        "kind": "ring",
        "n": 6,
        "seed": 0,
        "edges": [[i, (i + 1) % 6, 1.0] for i in range(5)] + [[0, 5, 1.0]],
        "biases": [],
    }
    bad = dict(good, id="ring-n7-s0", edges=[[0, 0, 1.0]])
    instances = tmp_path / "mixed.ndjson"
    instances.write_text(json.dumps(good) + "\n" + json.dumps(bad) + "\n")
    cfg = write_json(
        tmp_path / "cfg.json",
        {"instances_file": str(instances), "grid": "0:0.5:60"},
    )
    assert main(["run", "--config", cfg]) == 2
    captured = capsys.readouterr()
    assert "1/2 instances ok" in captured.out
    assert "ring-n7-s0" in captured.err


def test_sweep_prints_points(tmp_path, capsys, ring_run_config):
    assert main(["sweep", "--config", ring_run_config, "--grid", "0:0.3:10"]) == 0
    out = capsys.readouterr().out
    assert "11 sweep points" in out
    assert out.count("t=") == 11


def test_sweep_writes_csv(tmp_path, ring_run_config):
    out_dir = tmp_path / "sweeps"
    assert (
        main(
            [
                "sweep",
                "--config",
                ring_run_config,
                "--grid",
                "0:0.3:10",
                "--out",
                str(out_dir),
            ]
        )
        == 0
    )
    files = list(out_dir.glob("sweep-*.csv"))
    assert len(files) == 1
    assert len(read_rows(files[0])) == 11


def test_order_override_reaches_config(tmp_path, capsys):
    cfg = write_json(
        tmp_path / "qz.json",
        {
            "method": "qz",
            "order": 1,
            "kind": "ring",
            "sizes": [6],
            "seeds": [0],
            "grid": "0:0.2:8",
        },
    )
    # as written the config is valid; forcing a bogus order via flag fails at
    # argparse level (choices), which surfaces as a config error
    assert main(["sweep", "--config", cfg, "--order", "5"]) == 1
    assert main(["sweep", "--config", cfg, "--order", "0"]) == 0
    out = capsys.readouterr().out
    assert "9 sweep points" in out


def test_bound_quick_report(tmp_path, capsys):
    cfg = write_json(
        tmp_path / "bound.json",
        {"t": 0.05, "quad_step": 8e-3, "subgraphs": ["one-triangle"]},
    )
    out_dir = tmp_path / "bounds"
    assert main(["bound", "--config", cfg, "--out", str(out_dir)]) == 0
    out = capsys.readouterr().out
    assert "one-triangle: local=" in out
    rows = read_rows(out_dir / "bound.csv")
    assert len(rows) == 1 and rows[0]["subgraph"] == "one-triangle"


def test_bound_rejects_unknown_keys(tmp_path):
    cfg = write_json(tmp_path / "bound.json", {"t": 0.05, "step": 1})
    assert main(["bound", "--config", cfg]) == 1


def test_compare_prints_summary(tmp_path, capsys):
    cfg = write_json(
        tmp_path / "cmp.json",
        {"kind": "ring", "sizes": [6], "seeds": [0], "grid": "0:2:120"},
    )
    assert main(["compare", "--config", cfg]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["pairs"] == 1
    assert summary["h1_dominance_fraction"] == 1.0


def test_plotdata_missing_records_file(tmp_path):
    assert (
        main(["plotdata", "fig3-ring-saturation", str(tmp_path / "nope.csv")]) == 1
    )


def test_installed_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-c", "from commutopt.cli import main; raise SystemExit(main(['--version']))"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() != ""
