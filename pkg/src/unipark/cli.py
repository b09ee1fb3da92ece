"""The ``park`` command line: run, validate, and batch scenario files.

Exit codes: 0 success, 2 scenario validation failure, 3 runtime failure.
``park suite`` runs every scenario listed in a text file (one path per
line, ``#`` comments allowed), optionally in parallel across processes
when PARK_THREADS is set above 1, and fails if any scenario's embedded
assertions fail unless ``--no-strict`` is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional

from .errors import ParkError, ScenarioError
from .scenarios import (ScenarioFile, check_assertions, load_scenario,
                        write_metrics_json, write_trajectory_csv)
from .sim import compute_metrics, integrate

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _default_outputs(scenario_path: Path, loaded: ScenarioFile) -> tuple[Path, Path]:
    stem = scenario_path.stem
    csv_path = Path(loaded.csv_path) if loaded.csv_path else Path(f"{stem}.csv")
    metrics_path = Path(loaded.metrics_path) if loaded.metrics_path \
        else Path(f"{stem}_metrics.json")
    return csv_path, metrics_path


def _run_one(scenario_path: str, csv_override: Optional[str] = None,
             metrics_override: Optional[str] = None, quiet: bool = False) -> dict:
    path = Path(scenario_path)
    loaded = load_scenario(path)
    csv_path, metrics_path = _default_outputs(path, loaded)
    if csv_override:
        csv_path = Path(csv_override)
    if metrics_override:
        metrics_path = Path(metrics_override)

    trajectory = integrate(loaded.scenario)
    metrics = compute_metrics(trajectory, loaded.scenario)
    write_trajectory_csv(csv_path, trajectory)
    write_metrics_json(metrics_path, metrics)
    checks = check_assertions(loaded.assertions, trajectory, metrics)
    if not quiet:
        print(f"{loaded.scenario.name or path.stem}: status={metrics.status} "
              f"samples={len(trajectory.times)} -> {csv_path}, {metrics_path}")
        for name, ok, detail in checks:
            print(f"  assert {name}: {'ok' if ok else 'FAIL'} ({detail})")
    return {
        "scenario": str(path),
        "name": loaded.scenario.name or path.stem,
        "status": metrics.status,
        "metrics": metrics.to_dict(),
        "assertions": [(name, ok, detail) for name, ok, detail in checks],
        "passed": all(ok for _, ok, _ in checks),
    }


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        _run_one(args.scenario, args.csv, args.metrics)
    except ScenarioError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ParkError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        loaded = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"ok: {loaded.scenario.name or Path(args.scenario).stem}")
    return EXIT_OK


def _suite_worker(path: str) -> dict:
    try:
        return _run_one(path, quiet=True)
    except ScenarioError as exc:
        return {"scenario": path, "name": Path(path).stem, "status": "ValidationError",
                "metrics": None, "assertions": [("load", False, str(exc))], "passed": False}
    except (ParkError, OSError) as exc:
        return {"scenario": path, "name": Path(path).stem, "status": "RuntimeError",
                "metrics": None, "assertions": [("run", False, str(exc))], "passed": False}


def _cmd_suite(args: argparse.Namespace) -> int:
    list_path = Path(args.list)
    try:
        lines = list_path.read_text().splitlines()
    except OSError as exc:
        print(f"validation error: cannot read {list_path}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    base = list_path.parent
    paths: List[str] = []
    for line in lines:
        entry = line.split("#", 1)[0].strip()
        if entry:
            candidate = Path(entry)
            paths.append(str(candidate if candidate.is_absolute() else base / candidate))

    if not paths:
        print("suite: empty list, nothing to run")
        return EXIT_OK

    workers = int(os.environ.get("PARK_THREADS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_suite_worker, paths))
    else:
        results = [_suite_worker(path) for path in paths]

    width = max(len(r["name"]) for r in results)
    failures = 0
    for result in results:
        ok = result["passed"]
        failures += 0 if ok else 1
        flag = "PASS" if ok else "FAIL"
        print(f"{result['name']:<{width}}  {result['status']:<16} {flag}")
        if not ok:
            for name, good, detail in result["assertions"]:
                if not good:
                    print(f"    {name}: {detail}")
    print(f"suite: {len(results) - failures}/{len(results)} passed")
    if failures and not args.no_strict:
        return 1
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="park",
                                     description="Unicycle parking scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario, write CSV and metrics")
    p_run.add_argument("scenario")
    p_run.add_argument("--csv", help="override the trajectory CSV path")
    p_run.add_argument("--metrics", help="override the metrics JSON path")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check a scenario file without running it")
    p_val.add_argument("scenario")
    p_val.set_defaults(func=_cmd_validate)

    p_suite = sub.add_parser("suite", help="run every scenario in a list file")
    p_suite.add_argument("list")
    p_suite.add_argument("--no-strict", action="store_true",
                         help="exit 0 even when embedded assertions fail")
    p_suite.set_defaults(func=_cmd_suite)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
