"""Command-line entry point.

Every subcommand reads one config (the built-in examples by default),
runs the tasks of its command kind in declared order and prints a report.
``report`` runs every task.  Exit codes: 0 when every expectation is met,
1 on an unexpected result, 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import fnmatch
import json
import sys
from dataclasses import dataclass

from .config import COMMANDS, Config, load_config, paper_examples
from .errors import RationalParseError, SchemaError
from .tasks import TaskResult, run_task

REPORT_FORMAT = "factalg-report"
REPORT_VERSION = 1
EXIT_OK, EXIT_UNEXPECTED, EXIT_CONFIG = 0, 1, 2


@dataclass
class SuiteReport:
    config: str
    command: str
    overrides: dict
    results: list

    @property
    def n_met(self) -> int:
        return sum(r.met for r in self.results)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.n_met == len(self.results) else EXIT_UNEXPECTED

    def as_dict(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "version": REPORT_VERSION,
            "config": self.config,
            "command": self.command,
            "overrides": {k: v for k, v in sorted(self.overrides.items()) if v is not None},
            "tasks": [{"id": r.id, "command": r.command, "check": r.check, "status": r.status,
                       "expected": r.expected, "met": r.met, "values": r.values, "witnesses": r.witnesses,
                       "mismatched": r.mismatched} for r in self.results],
            "summary": {"tasks": len(self.results), "met": self.n_met,
                        "unexpected": len(self.results) - self.n_met},
        }

    def to_text(self) -> str:
        lines = [f"factalg report v{REPORT_VERSION}", f"config: {self.config}", f"command: {self.command}"]
        ov = ", ".join(f"{k}={v}" for k, v in sorted(self.overrides.items()) if v is not None)
        if ov:
            lines.append(f"overrides: {ov}")
        for r in self.results:
            tag = "MET" if r.met else "UNEXPECTED"
            lines.append(f"[{tag}] {r.id} {r.command}/{r.check}: {r.status} (expected {r.expected})")
            for k, v in r.values.items():
                lines.append(f"    {k} = {json.dumps(v, sort_keys=True)}")
            for w in r.witnesses[:3]:
                lines.append(f"    witness: {json.dumps(w, sort_keys=True)}")
            for k, want, got in r.mismatched:
                lines.append(f"    mismatch {k}: expected {json.dumps(want)} got {json.dumps(got)}")
        lines.append(f"summary: {len(self.results)} tasks, {self.n_met} met, "
                     f"{len(self.results) - self.n_met} unexpected")
        return "\n".join(lines) + "\n"

    def to_machine(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"


def select_tasks(cfg: Config, command: str, pattern: str | None) -> list:
    out = []
    for t in cfg.tasks:
        if command != "report" and t.command != command:
            continue
        if pattern and not (fnmatch.fnmatchcase(t.id, pattern) or pattern in t.id):
            continue
        out.append(t)
    return out


def run_suite(cfg: Config, command: str = "report", pattern: str | None = None,
              tree_bound: int | None = None, grid: int | None = None) -> SuiteReport:
    """Run the selected tasks in declared order; failures do not stop the run."""
    overrides = {"tree_bound": tree_bound, "grid": grid}
    results: list[TaskResult] = [run_task(cfg, t, overrides) for t in select_tasks(cfg, command, pattern)]
    return SuiteReport(cfg.name or cfg.source, command, overrides, results)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="factalg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS + ("report",):
        p = sub.add_parser(name, help=f"run the {name} tasks" if name != "report" else "run every task")
        p.add_argument("--config", help="config path (default: the built-in examples)")
        p.add_argument("--task", help="task id filter (glob or substring)")
        p.add_argument("--tree-bound", type=int, help="override the tree vertex bound")
        p.add_argument("--grid", type=int, help="override the certification grid")
        p.add_argument("--emit", choices=["text", "machine-readable"], default="text")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else paper_examples()
        report = run_suite(cfg, args.command, args.task, args.tree_bound, args.grid)
    except (SchemaError, RationalParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(report.to_machine() if args.emit == "machine-readable" else report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
