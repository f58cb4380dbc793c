from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ccsim.detectors.findings import STARVATION_NEVER, Finding

ALWAYS = "Always"
SOMETIMES = "Sometimes"
NEVER = "Never"


@dataclass
class LivenessResult:
    verdict: str
    successes: int
    schedules: int
    within_bounds: bool
    finding: Finding | None = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "successes": self.successes,
                "schedules": self.schedules, "within_bounds": self.within_bounds}


def goal_reached(outcome, client: str, method: str) -> bool:
    for s in outcome.steps:
        if s.actor == client and s.tx.method == method and s.result.ok:
            if s.result.value is not False:
                return True
    return False


def probe_liveness(outcomes: Sequence, client: str, method: str,
                   truncated: bool = False) -> LivenessResult:
    """Does ``client`` ever get ``method`` to succeed?  Bounded exploration only."""
    hits = [o.schedule_id for o in outcomes if goal_reached(o, client, method)]
    n = len(outcomes)
    if n and len(hits) == n:
        verdict = ALWAYS
    elif hits:
        verdict = SOMETIMES
    else:
        verdict = NEVER
    finding = None
    if verdict == NEVER:
        scope = "within bounds" if truncated else "in every explored schedule"
        finding = Finding(
            STARVATION_NEVER,
            f"{client}.{method} never succeeds ({scope}, {n} schedules)",
            {"client": client, "method": method, "schedules": sorted(o.schedule_id for o in outcomes),
             "within_bounds": truncated},
        )
    return LivenessResult(verdict, len(hits), n, truncated, finding)
