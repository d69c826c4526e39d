from __future__ import annotations

import json
from pathlib import Path

from cloudcost.cli import main

FIXTURES = Path(__file__).parent.parent / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / name)


def simulate_args(tmp_path: Path, **extra) -> list[str]:
    args = ["simulate",
            "--model", fixture("school.cloudmodel.json"),
            "--catalog", fixture("aws-2010-eu.prices.json"),
            "--from", "2010-09", "--to", "2016-08",
            "--discount-rate", "0.05",
            "--csv", str(tmp_path / "out.csv"),
            "--html", str(tmp_path / "out.html"),
            "--json", str(tmp_path / "out.json")]
    for key, value in extra.items():
        args += [f"--{key}", value]
    return args


def test_simulate_school_end_to_end(tmp_path, capsys):
    assert main(simulate_args(tmp_path)) == 0
    assert (tmp_path / "out.csv").stat().st_size > 0
    html = (tmp_path / "out.html").read_text()
    assert html.startswith("<!DOCTYPE html>")
    report = json.loads((tmp_path / "out.json").read_text())
    assert len(report["report"]["monthly_totals"]) == 72
    err = capsys.readouterr().err
    assert "simulated school-elastic" in err


def test_simulate_byte_identical_runs(tmp_path):
    assert main(simulate_args(tmp_path)) == 0
    first = {n: (tmp_path / n).read_bytes() for n in ("out.csv", "out.html", "out.json")}
    assert main(simulate_args(tmp_path)) == 0
    for name, data in first.items():
        assert (tmp_path / name).read_bytes() == data


def test_simulate_missing_price_exits_2(tmp_path, capsys):
    model = json.loads((FIXTURES / "school.cloudmodel.json").read_text())
    model["nodes"][0]["server_type"] = "Exotic.Huge"
    bad = tmp_path / "bad.cloudmodel.json"
    bad.write_text(json.dumps(model))
    code = main(["simulate", "--model", str(bad),
                 "--catalog", fixture("aws-2010-eu.prices.json"),
                 "--from", "2010-09", "--to", "2010-12"])
    assert code == 2
    err = capsys.readouterr().err
    assert "price not found: aws/eu/instance-hour/Exotic.Huge" in err


def test_simulate_malformed_pattern_exits_2(tmp_path, capsys):
    model = json.loads((FIXTURES / "school.cloudmodel.json").read_text())
    model["nodes"][0]["instance_count"] = {"baseline": 1, "patterns": "temp: every zzz +1"}
    bad = tmp_path / "bad.cloudmodel.json"
    bad.write_text(json.dumps(model))
    code = main(["simulate", "--model", str(bad),
                 "--catalog", fixture("aws-2010-eu.prices.json"),
                 "--from", "2010-09", "--to", "2010-12"])
    assert code == 2
    err = capsys.readouterr().err
    assert "position" in err and "zzz" in err


def test_simulate_window_reversed_exits_2(capsys):
    code = main(["simulate", "--model", fixture("school.cloudmodel.json"),
                 "--catalog", fixture("aws-2010-eu.prices.json"),
                 "--from", "2012-09", "--to", "2010-09"])
    assert code == 2
    assert "after" in capsys.readouterr().err


COMPARE_BASE = [
    "compare",
    "--option", "elastic=" + fixture("school.cloudmodel.json"),
    "--option", "lease=" + fixture("school-lease.cloudmodel.json"),
    "--plan", "buy=" + fixture("school-buy.plan.json"),
    "--catalog", fixture("aws-2010-eu.prices.json"),
    "--from", "2010-09", "--to", "2016-08",
    "--discount-rate", "0.05",
]


def test_compare_three_options(tmp_path, capsys):
    out_json = tmp_path / "cmp.json"
    assert main(COMPARE_BASE + ["--json", str(out_json)]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0].startswith("option\tyear 0")
    assert len(lines) == 4  # header + three options
    ranking = json.loads(out_json.read_text())["ranking"]
    assert [r["label"] for r in ranking] == ["buy", "elastic", "lease"]


def test_compare_with_scenario_elastic_cheapest(capsys):
    assert main(COMPARE_BASE + ["--scenario", fixture("cut15.scenario.json")]) == 0
    out = capsys.readouterr().out
    first_option = out.strip().splitlines()[1].split("\t")[0]
    assert first_option == "elastic"


def test_compare_single_option_exits_2(capsys):
    code = main(["compare",
                 "--option", "elastic=" + fixture("school.cloudmodel.json"),
                 "--catalog", fixture("aws-2010-eu.prices.json"),
                 "--from", "2010-09", "--to", "2016-08"])
    assert code == 2
    assert ">= 2 options" in capsys.readouterr().err


def test_compare_misaligned_window_exits_2(capsys):
    code = main(COMPARE_BASE[:-4] + ["--from", "2010-09", "--to", "2011-09"])
    assert code == 2
    assert "year-aligned" in capsys.readouterr().err


def test_assess_proceed(capsys):
    assert main(["assess", fixture("school.assessment.json")]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "proceed"
    assert "positive net benefit" in out


def test_assess_blocking(tmp_path, capsys):
    doc = json.loads((FIXTURES / "school.assessment.json").read_text())
    doc["checklist"]["security.requirements"] = "no"
    path = tmp_path / "bad.assessment.json"
    path.write_text(json.dumps(doc))
    assert main(["assess", str(path)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "do-not-proceed"
    assert "security.requirements" in out


def test_assess_missing_file(capsys):
    assert main(["assess", "/nonexistent/x.assessment.json"]) == 2
    assert "error" in capsys.readouterr().err


def test_no_command_prints_help(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err.lower()
