"""Order-dependence analyses over a set of outcomes: TOD and lost updates."""

from __future__ import annotations

import logging
from collections import defaultdict
from typing import Iterable, Sequence

from ccsim.detectors.findings import LOST_UPDATE, TOD, Finding
from ccsim.explorer import Outcome

log = logging.getLogger(__name__)


def _flatten(doc, prefix=""):
    if isinstance(doc, dict):
        for k in sorted(doc):
            yield from _flatten(doc[k], f"{prefix}.{k}" if prefix else str(k))
    else:
        yield prefix, doc


def _observable(outcome: Outcome, watched: Iterable[str]) -> dict:
    return {"state": outcome.watched_view(watched), "payouts": dict(sorted(outcome.payouts.items()))}


def detect_tod(outcomes: Sequence[Outcome], watched: Iterable[str]) -> Finding | None:
    """Flag the scenario if two schedules end in different watched state or payouts.

    Outcomes are compared in schedule-id order against the lowest id, so the
    result does not depend on the order of ``outcomes``.
    """
    watched = sorted(watched)
    ordered = sorted(outcomes, key=lambda o: o.schedule_id)
    if len(ordered) < 2:
        return None
    base = ordered[0]
    base_flat = dict(_flatten(_observable(base, watched)))
    for other in ordered[1:]:
        flat = dict(_flatten(_observable(other, watched)))
        if flat == base_flat:
            continue
        key = next(k for k in sorted(set(base_flat) | set(flat))
                   if base_flat.get(k) != flat.get(k))
        return Finding(
            TOD,
            f"outcome depends on transaction order: {key} is {base_flat.get(key)!r} "
            f"in schedule {base.schedule_id} but {flat.get(key)!r} in schedule {other.schedule_id}",
            {"schedules": [base.schedule_id, other.schedule_id], "key": key,
             "values": [base_flat.get(key), flat.get(key)]},
        )
    return None


def tx_accesses(outcome: Outcome) -> list[dict[tuple[str, str], set[str]]]:
    """Per step: (contract, key) -> {"R", "W"} for effects that stuck."""
    out = []
    for s in outcome.steps:
        acc: dict[tuple[str, str], set[str]] = defaultdict(set)
        if s.trace.committed:
            dropped = s.trace.failed_frames()
            for e in s.trace.events:
                if e.frame in dropped:
                    continue
                if e.kind == "Read":
                    acc[(e["contract"], e["key"])].add("R")
                elif e.kind == "Write":
                    acc[(e["contract"], e["key"])].add("W")
        out.append(dict(acc))
    return out


def lost_updates_in(outcome: Outcome) -> list[Finding]:
    """Span-based lost updates in a single outcome.

    For each span and key, consecutive committed transactions of that span
    touching the key form a pair; if either side writes and another span
    committed a write to the key in between, the span's update was lost.
    """
    accesses = tx_accesses(outcome)
    by_span: dict[str, list[int]] = defaultdict(list)
    for i, s in enumerate(outcome.steps):
        if s.tx.span is not None and s.trace.committed:
            by_span[s.tx.span].append(i)

    findings = []
    for span in sorted(by_span):
        idxs = by_span[span]
        keys = sorted({k for i in idxs for k in accesses[i]})
        for key in keys:
            touching = [i for i in idxs if key in accesses[i]]
            for i, j in zip(touching, touching[1:]):
                if "W" not in accesses[i][key] and "W" not in accesses[j][key]:
                    continue
                for m in range(i + 1, j):
                    other = outcome.steps[m]
                    if other.tx.span == span or "W" not in accesses[m].get(key, ()):
                        continue
                    findings.append(Finding(
                        LOST_UPDATE,
                        f"schedule {outcome.schedule_id}: span {span} touched {key[0]}.{key[1]} "
                        f"in tx {i} and tx {j}, but {other.actor} wrote it in tx {m}",
                        {"schedule": outcome.schedule_id, "span": span, "contract": key[0],
                         "key": key[1], "txs": [i, m, j]},
                    ))
                    break
    return findings


def counter_lost_update(outcome: Outcome, contract: str, key: str, initial: int) -> Finding | None:
    """Spec form: the final counter should equal initial + spans that committed a write."""
    accesses = tx_accesses(outcome)
    spans = {s.tx.span for i, s in enumerate(outcome.steps)
             if s.tx.span is not None and "W" in accesses[i].get((contract, key), ())}
    final = outcome.world.load(contract, key)
    expected = initial + len(spans)
    if final == expected:
        return None
    return Finding(
        LOST_UPDATE,
        f"schedule {outcome.schedule_id}: {contract}.{key} ends at {final}, expected {expected} "
        f"after {len(spans)} increments",
        {"schedule": outcome.schedule_id, "contract": contract, "key": key,
         "final": final, "expected": expected},
    )


def detect_lost_update(outcomes: Sequence[Outcome], counter: tuple[str, str, int] | None = None
                       ) -> list[Finding]:
    """Lost updates across all outcomes, in schedule-id order.

    ``counter`` = (contract, key, initial) also enables the final-value check.
    """
    ordered = sorted(outcomes, key=lambda o: o.schedule_id)
    if any(s.tx.span is None for o in ordered for s in o.steps
           if not s.actor.startswith("oracle:")):
        log.warning("client transactions without span labels; lost-update analysis skipped")
        return []
    findings = []
    for outcome in ordered:
        findings.extend(lost_updates_in(outcome))
        if counter is not None:
            f = counter_lost_update(outcome, *counter)
            if f is not None:
                findings.append(f)
    return findings


def schedules_with(findings: Iterable[Finding]) -> set[int]:
    return {f.witness["schedule"] for f in findings if "schedule" in f.witness}
