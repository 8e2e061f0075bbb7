import json

import pytest

from factalg.cli import EXIT_CONFIG, EXIT_OK, EXIT_UNEXPECTED, main, run_suite, select_tasks
from factalg.config import paper_examples_text, parse_config

FAST = "c01*"


def write_variant(tmp_path, mutate):
    d = json.loads(paper_examples_text())
    mutate(d)
    p = tmp_path / "variant.json"
    p.write_text(json.dumps(d))
    return str(p)


def test_full_report_meets_every_expectation(paper_report):
    assert paper_report.exit_code == EXIT_OK
    assert paper_report.n_met == len(paper_report.results) == 32
    assert [r.id for r in paper_report.results] == [t.id for t in parse_config(paper_examples_text()).tasks]


def test_expected_fail_counts_as_met(paper_results):
    r = paper_results["c06-x2-unmarked-not-constructible"]
    assert r.status == "fail" and r.expected == "fail" and r.met


def test_certified_status_format(paper_results):
    assert paper_results["c10-normality-restricted-sieve"].status.startswith("certified-up-to(")
    assert "max_vertices=5" in paper_results["c10-normality-restricted-sieve"].status


def test_unexpected_mismatch_exits_1(tmp_path, capsys):
    def flip(d):
        for t in d["tasks"]:
            if t["id"] == "c01-circle-M2":
                t["expect"]["values"]["dim"] = 2
    path = write_variant(tmp_path, flip)
    assert main(["sections", "--config", path]) == EXIT_UNEXPECTED
    out = capsys.readouterr().out
    assert "[UNEXPECTED] c01-circle-M2" in out and "mismatch dim: expected 2 got 1" in out


def test_expected_status_flip_exits_1(tmp_path):
    def flip(d):
        for t in d["tasks"]:
            if t["id"] == "c06-x2-unmarked-not-constructible":
                t["expect"]["status"] = "pass"
    assert main(["check-algebra", "--config", write_variant(tmp_path, flip), "--task", "c06*"]) == EXIT_UNEXPECTED


def test_config_error_exits_2(tmp_path, capsys):
    def bad(d):
        d["spaces"]["R"]["marks"] = ["1/0"]
    assert main(["report", "--config", write_variant(tmp_path, bad)]) == EXIT_CONFIG
    assert "zero denominator" in capsys.readouterr().err
    assert main(["report", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_subcommand_selects_its_tasks(paper_config):
    ids = [t.id for t in select_tasks(paper_config, "sections", None)]
    assert ids == ["c01-circle-M2", "c01-circle-dual-numbers"]
    assert [t.id for t in select_tasks(paper_config, "report", "c14")] == ["c14-colimit-pushout"]


def test_machine_readable_report(capsys):
    assert main(["sections", "--emit", "machine-readable"]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["format"] == "factalg-report" and rep["version"] == 1
    assert rep["summary"] == {"tasks": 2, "met": 2, "unexpected": 0}
    assert rep["tasks"][0]["values"]["dim"] == 1


def test_reports_are_byte_identical(capsys):
    outs = []
    for emit in ("text", "machine-readable"):
        for _ in range(2):
            main(["report", "--task", "c0[129]*", "--emit", emit])
            outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1] and outs[2] == outs[3]


def test_overrides_are_reported_and_applied(paper_config):
    rep = run_suite(paper_config, "dendro-verify", "c10-normality-restricted*", tree_bound=3)
    r = rep.results[0]
    assert "max_vertices=3" in r.status and rep.overrides["tree_bound"] == 3
    assert "tree_bound=3" in rep.to_text()
    g = run_suite(paper_config, "check-space", "space-weiss*", grid=3)
    assert g.results[0].status == "fail" and "grid=3" in g.to_text()


def test_console_module_runs():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-m", "factalg", "sections"], capture_output=True, text=True)
    assert out.returncode == 0 and "summary: 2 tasks, 2 met, 0 unexpected" in out.stdout


def test_argparse_rejects_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["fly"])
