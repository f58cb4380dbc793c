"""Run detectors over an exploration and render the result.

The JSON document is the single source of truth; the text form is
rendered from it and never recomputed.
"""

from __future__ import annotations

import json
from typing import Iterable

from ccsim.corpus import get_spec
from ccsim.detectors import (
    DEFAULT_FAILING_KINDS,
    NON_LINEARIZABLE,
    UNKNOWN,
    Finding,
    audit_conservation,
    check_linearizability,
    detect_lost_update,
    detect_reentrancy_all,
    detect_tod,
    history_from_outcome,
    probe_liveness,
)
from ccsim.explorer import Exploration
from ccsim.scenario import Scenario

DETECTORS = ("tod", "lost-update", "reentrancy", "linearizability", "liveness", "conservation")


def _lincheck_findings(scenario: Scenario, exploration: Exploration) -> tuple[list[Finding], dict]:
    cfg = scenario.checks.get("linearizability")
    if not cfg:
        return [], {"verdict": "skipped"}
    spec = get_spec(cfg["spec"])
    contract = cfg.get("contract")
    initial = scenario.build_world().load(contract, "balance") if contract else None
    granularity = cfg.get("granularity", "tx")
    findings, unknown = [], 0
    for o in exploration.outcomes:
        history = history_from_outcome(o, contract, granularity)
        res = check_linearizability(history, spec, initial)
        if res.verdict == UNKNOWN:
            unknown += 1
        elif res.verdict == NON_LINEARIZABLE:
            findings.append(Finding(
                NON_LINEARIZABLE,
                f"schedule {o.schedule_id}: {granularity}-level history is not linearizable "
                f"against {spec.name}",
                {"schedule": o.schedule_id, "history": [op.to_json() for op in history]},
            ))
    summary = {"verdict": "found" if findings else "clean", "findings": len(findings),
               "unknown": unknown, "spec": spec.name, "granularity": granularity}
    return findings, summary


def analyze(scenario: Scenario, exploration: Exploration, detect: Iterable[str] | None = None,
            fail_on: Iterable[str] = DEFAULT_FAILING_KINDS, with_traces: bool = False) -> dict:
    selected = set(DETECTORS if detect is None else detect)
    unknown = selected - set(DETECTORS)
    if unknown:
        raise ValueError(f"unknown detectors: {', '.join(sorted(unknown))}")
    outcomes = exploration.outcomes
    findings: list[Finding] = []
    summary: dict[str, dict] = {}

    def record(name: str, found: list[Finding]):
        findings.extend(found)
        summary[name] = {"verdict": "found" if found else "clean", "findings": len(found)}

    if "tod" in selected:
        f = detect_tod(outcomes, scenario.watched_addresses)
        record("tod", [f] if f else [])
    if "lost-update" in selected:
        counter = None
        cfg = scenario.checks.get("counter")
        if cfg:
            key = cfg.get("key", "balance")
            initial = scenario.build_world().load(cfg["contract"], key)
            counter = (cfg["contract"], key, initial)
        record("lost-update", detect_lost_update(outcomes, counter))
    if "reentrancy" in selected:
        record("reentrancy", detect_reentrancy_all(outcomes))
    if "conservation" in selected:
        f = audit_conservation(outcomes)
        record("conservation", [f] if f else [])
    if "linearizability" in selected:
        found, summary["linearizability"] = _lincheck_findings(scenario, exploration)
        findings.extend(found)
    if "liveness" in selected:
        goal = scenario.checks.get("liveness")
        if goal:
            res = probe_liveness(outcomes, goal["client"], goal["method"], exploration.truncated)
            summary["liveness"] = {**res.to_json(), "goal": f"{goal['client']}.{goal['method']}"}
            if res.finding:
                findings.append(res.finding)
        else:
            summary["liveness"] = {"verdict": "skipped"}

    fail_on = set(fail_on)
    exit_code = 1 if any(f.kind in fail_on for f in findings) else 0
    return {
        "scenario": scenario.name,
        "settings": {
            "send_mode": scenario.send_mode,
            "depth_cap": scenario.depth_cap,
            "step_budget": scenario.step_budget,
            "block_size": scenario.block_size,
            "base_block_number": scenario.base_block_number,
            "max_schedules": scenario.max_schedules,
        },
        "exploration": {
            "mode": exploration.mode,
            "seed": exploration.seed,
            "schedules": len(outcomes),
            "truncated": exploration.truncated,
        },
        "detectors": {k: summary[k] for k in sorted(summary)},
        "findings": [f.to_json() for f in findings],
        "outcomes": [o.to_json(with_traces) for o in sorted(outcomes, key=lambda o: o.schedule_id)],
        "fail_on": sorted(fail_on),
        "exit_code": exit_code,
    }


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def to_text(report: dict) -> str:
    ex = report["exploration"]
    lines = [
        f"scenario: {report['scenario']}",
        f"exploration: {ex['mode']}, {ex['schedules']} schedules"
        + (" (TRUNCATED, results hold within bounds)" if ex["truncated"] else "")
        + (f", seed {ex['seed']}" if ex["seed"] is not None else ""),
        "",
        "detectors:",
    ]
    for name, s in report["detectors"].items():
        extra = ""
        if "findings" in s:
            extra = f" ({s['findings']} findings)"
        if name == "liveness" and s["verdict"] != "skipped":
            extra = f" {s['goal']}: {s['successes']}/{s['schedules']} schedules"
        lines.append(f"  {name:<16} {s['verdict']}{extra}")
    if report["findings"]:
        lines += ["", "findings:"]
        lines += [f"  [{f['kind']}] {f['summary']}" for f in report["findings"]]
    lines += ["", f"exit code: {report['exit_code']}"]
    return "\n".join(lines) + "\n"
