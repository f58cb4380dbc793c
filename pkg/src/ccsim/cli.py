"""ccsim command line: run scenarios, check histories, list the corpus."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ccsim import report as reporting
from ccsim.corpus import get_spec, registry_listing
from ccsim.detectors import (
    KINDS,
    LINEARIZABLE,
    UNKNOWN,
    Operation,
    check_linearizability,
)
from ccsim.explorer import explore_exhaustive, explore_random
from ccsim.runtime import SEND_MODES, _jsonable
from ccsim.scenario import ScenarioError, load

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_INPUT = 2
EXIT_BOUND = 3


def _csv(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _block_size(text: str) -> int:
    if text.lower() in ("inf", "infinite", "0"):
        return 0
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("block size must be >= 1 (or 'inf')")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="explore a scenario and run the detectors")
    run.add_argument("scenario", help="scenario JSON file (or the name of a packaged scenario)")
    run.add_argument("--explore", choices=("exhaustive", "random"), default="exhaustive")
    run.add_argument("--max-schedules", type=int, default=None)
    run.add_argument("--seed", type=int, default=None,
                     help="random-exploration seed (default: $CCSIM_SEED or 0)")
    run.add_argument("--runs", type=int, default=100, help="number of random runs")
    run.add_argument("--block-size", type=_block_size, default=None,
                     help="transactions per block; 'inf' puts all in one block")
    run.add_argument("--send-mode", choices=SEND_MODES, default=None)
    run.add_argument("--depth-cap", type=int, default=None)
    run.add_argument("--detect", type=_csv, default=None,
                     help=f"comma-separated subset of {','.join(reporting.DETECTORS)}")
    run.add_argument("--fail-on", type=_csv, default=None,
                     help=f"finding kinds that make the exit code 1 (from {','.join(KINDS)})")
    run.add_argument("--dump-traces", type=Path, default=None, help="write JSON-lines traces here")
    run.add_argument("--out", type=Path, default=None)
    run.add_argument("--format", choices=("json", "text"), default="json")

    lin = sub.add_parser("lincheck", help="check a history file for linearizability")
    lin.add_argument("history")
    lin.add_argument("spec", nargs="?", default="counter")
    lin.add_argument("--initial", type=int, default=None)

    sub.add_parser("list-contracts", help="print the contract registry")
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def dump_traces(exploration, path: Path) -> None:
    with path.open("w") as fh:
        for o in sorted(exploration.outcomes, key=lambda o: o.schedule_id):
            for i, s in enumerate(o.steps):
                for e in s.trace.events:
                    row = {"schedule": o.schedule_id, "tx": i, "actor": s.actor,
                           "method": s.tx.method, "status": s.trace.status, **e.to_json()}
                    fh.write(json.dumps(_jsonable(row), sort_keys=True) + "\n")


def cmd_run(args) -> int:
    try:
        scenario = load(args.scenario)
        scenario = scenario.with_overrides(
            send_mode=args.send_mode, depth_cap=args.depth_cap, block_size=args.block_size,
            max_schedules=args.max_schedules,
        )
    except ScenarioError as exc:
        print(f"ccsim: {exc}", file=sys.stderr)
        return EXIT_INPUT
    seed = args.seed if args.seed is not None else int(os.environ.get("CCSIM_SEED", "0"))
    if args.explore == "exhaustive":
        exploration = explore_exhaustive(scenario)
    else:
        exploration = explore_random(scenario, seed, args.runs)
    fail_on = args.fail_on if args.fail_on is not None else reporting.DEFAULT_FAILING_KINDS
    bad = set(fail_on) - set(KINDS)
    if bad:
        print(f"ccsim: unknown finding kinds: {', '.join(sorted(bad))}", file=sys.stderr)
        return EXIT_INPUT
    try:
        rep = reporting.analyze(scenario, exploration, args.detect, fail_on)
    except ValueError as exc:
        print(f"ccsim: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.dump_traces is not None:
        dump_traces(exploration, args.dump_traces)
    text = reporting.to_json(rep) if args.format == "json" else reporting.to_text(rep)
    _emit(text, args.out)
    return rep["exit_code"]


def cmd_lincheck(args) -> int:
    try:
        doc = json.loads(Path(args.history).read_text())
        spec = get_spec(args.spec)
        ops_doc = doc["ops"] if isinstance(doc, dict) else doc
        history = [Operation.from_json(o) for o in ops_doc]
        initial = args.initial
        if initial is None and isinstance(doc, dict) and "initial" in doc:
            initial = doc["initial"]
        result = check_linearizability(history, spec, initial)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"ccsim: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(result.verdict)
    if result.verdict == LINEARIZABLE:
        order = [f"{history[i].client}:{history[i].op}" for i in result.witness]
        print("witness: " + (" -> ".join(order) if order else "(empty history)"))
        return EXIT_CLEAN
    if result.verdict == UNKNOWN:
        print(result.reason)
        return EXIT_BOUND
    print(result.reason)
    return EXIT_FINDINGS


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "lincheck":
        return cmd_lincheck(args)
    sys.stdout.write(registry_listing())
    return EXIT_CLEAN


if __name__ == "__main__":
    sys.exit(main())
