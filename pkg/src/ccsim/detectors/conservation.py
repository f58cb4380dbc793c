from __future__ import annotations

from typing import Sequence

from ccsim.detectors.findings import CONSERVATION_BREACH, Finding


def audit_conservation(outcomes: Sequence) -> Finding | None:
    """Engine self-check: no transaction, committed or reverted, may mint or burn."""
    for outcome in sorted(outcomes, key=lambda o: o.schedule_id):
        for i, trace in enumerate(outcome.traces):
            if trace.value_before != trace.value_after:
                return Finding(
                    CONSERVATION_BREACH,
                    f"schedule {outcome.schedule_id}, tx {i} ({trace.tx.method}, {trace.status}) "
                    f"changed total value {trace.value_before} -> {trace.value_after}",
                    {"schedule": outcome.schedule_id, "tx": i,
                     "before": trace.value_before, "after": trace.value_after},
                )
            if not trace.committed and trace.hash_before != trace.hash_after:
                return Finding(
                    CONSERVATION_BREACH,
                    f"schedule {outcome.schedule_id}, tx {i} reverted but changed the world",
                    {"schedule": outcome.schedule_id, "tx": i},
                )
    return None
