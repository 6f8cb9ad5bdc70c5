"""Command-line front end.

Usage::

    kkfilt <command> <inputs> [--window n] [--truncation n] [--strict] [--summary] [--out path]
    kkfilt --file jobs.txt [--out path]

Exit codes: 0 success, 1 parse or semantic error, 2 inconclusive under
``--strict``, 3 golden mismatch or internal invariant violation, 4 I/O.
"""

from __future__ import annotations

import json
import sys

from .expr import ParseError
from .jobs import COMMANDS, JobSpec, execute, has_inconclusive, parse_input, parse_jobs
from .tower import InvariantViolation

EXIT_OK, EXIT_PARSE, EXIT_STRICT, EXIT_MISMATCH, EXIT_IO = 0, 1, 2, 3, 4

_SUMMARY_KEYS = {"value", "verdict", "status", "ok", "split", "hausdorff", "discrete",
                 "zadic_discrete_ext", "jensen_discrete", "agree"}
_SKIP = {"certificate", "certificates", "evidence", "parts", "stages", "profile", "maps",
         "failures", "kk_certificate", "roos", "jensen_kernels", "zadic_checks", "notes"}


def render_json(report: dict) -> str:
    """Deterministic serialization: sorted keys, no timestamps."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _rows(obj, path: str, out: list) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            if k in _SKIP:
                continue
            p = f"{path}.{k}" if path else k
            v = obj[k]
            if k in _SUMMARY_KEYS and not isinstance(v, (dict, list)):
                out.append((path or k, k, v))
            else:
                _rows(v, p, out)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _rows(v, f"{path}.{i}", out)


def render_summary(report: dict) -> str:
    rows = []
    _rows(report.get("result", {}), "", rows)
    lines = [f"{report['command']}: {report['input']}"]
    width = max((len(f"{p} [{k}]") for p, k, _ in rows), default=0)
    for p, k, v in rows:
        lines.append(f"  {f'{p} [{k}]':<{width}}  {json.dumps(v)}")
    return "\n".join(lines) + "\n"


def run_job(job: JobSpec) -> tuple[dict | None, int, str]:
    """Execute one job; returns (report, exit code, diagnostic)."""
    try:
        report = execute(job)
    except InvariantViolation as exc:
        return None, EXIT_MISMATCH, f"invariant violation: {exc}"
    code = EXIT_OK
    if job.command == "catalog-run" and not report["result"]["ok"]:
        code = EXIT_MISMATCH
    elif job.strict and has_inconclusive(report["result"]):
        code = EXIT_STRICT
    return report, code, ""


def _write(text: str, path: str | None) -> int:
    if path is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _usage() -> str:
    return __doc__ + "\ncommands: " + ", ".join(COMMANDS) + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(_usage())
        return EXIT_OK if argv else EXIT_PARSE
    if argv[0] == "--file":
        return _main_file(argv[1:])
    try:
        job = parse_input(" ".join(argv))
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report, code, diag = run_job(job)
    if report is None:
        print(diag, file=sys.stderr)
        return code
    io = _write(render_json(report), job.out)
    if io:
        return io
    if job.summary:
        (sys.stderr if job.out is None else sys.stdout).write(render_summary(report))
    return code


def _main_file(args: list[str]) -> int:
    if not args:
        print("--file needs a path", file=sys.stderr)
        return EXIT_PARSE
    path, out = args[0], None
    if len(args) >= 3 and args[1] == "--out":
        out = args[2]
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        jobs = parse_jobs(text)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    reports, worst = [], EXIT_OK
    for j in jobs:
        report, code, diag = run_job(j.spec)
        if report is None:
            report = {"schema": 1, "command": j.spec.command, "input": j.spec.to_text(),
                      "error": diag}
        report["line"] = j.line_no
        reports.append(report)
        worst = max(worst, code)
    io = _write(render_json({"schema": 1, "jobs": reports}), out)
    return io or worst


if __name__ == "__main__":
    sys.exit(main())
