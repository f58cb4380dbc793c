"""Reentrancy interference inside a single committed trace."""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

from ccsim.detectors.findings import REENTRANCY, Finding
from ccsim.runtime import Trace


def detect_reentrancy(trace: Trace) -> Finding | None:
    """Find an outer frame whose assumptions a re-entrant frame broke.

    Frame ``f`` of contract C is suspended while a child frame runs.  If
    some descendant frame of the same contract writes a key that ``f``
    read before the suspension, or writes again after it, the callee has
    mutated state the caller treated as stable.
    """
    if not trace.committed:
        return None
    frames = trace.frames()
    dropped = trace.failed_frames()
    children: dict[int, list[int]] = defaultdict(list)
    for fid, fr in frames.items():
        if fr.parent is not None:
            children[fr.parent].append(fid)
    exit_seq = {e.frame: e.seq for e in trace.events if e.kind == "CallExit"}

    def subtree(fid: int) -> list[int]:
        out, todo = [], [fid]
        while todo:
            cur = todo.pop()
            out.append(cur)
            todo.extend(children[cur])
        return out

    for fid in sorted(frames):
        outer = frames[fid]
        if fid in dropped:
            continue
        own = [e for e in trace.events if e.frame == fid and e.kind in ("Read", "Write")]
        for cid in sorted(children[fid]):
            suspend_at = frames[cid].trigger
            resume_at = exit_seq[cid]
            inner = [
                e for g in subtree(cid) if g not in dropped and frames[g].contract == outer.contract
                for e in trace.events if e.frame == g and e.kind == "Write"
            ]
            if not inner:
                continue
            read_before = {e["key"]: e.seq for e in own if e.kind == "Read" and e.seq < suspend_at}
            write_after = {e["key"]: e.seq for e in own if e.kind == "Write" and e.seq > resume_at}
            conflicts = [w for w in sorted(inner, key=lambda e: e.seq)
                         if w["key"] in read_before or w["key"] in write_after]
            if not conflicts:
                continue
            keys = sorted({w["key"] for w in conflicts})
            # prefer a key the outer frame both relied on and overwrote
            both = [w for w in conflicts if w["key"] in read_before and w["key"] in write_after]
            w = (both or conflicts)[0]
            key = w["key"]
            how = "read before" if key in read_before else "wrote after"
            return Finding(
                REENTRANCY,
                f"{outer.contract}.{outer.method} (frame {fid}) {how} the call at event "
                f"{suspend_at}, while re-entrant frame {w.frame} wrote {key}",
                {
                    "contract": outer.contract,
                    "key": key,
                    "keys": keys,
                    "outer_frame": fid,
                    "inner_frame": w.frame,
                    "suspension_event": suspend_at,
                    "inner_write_event": w.seq,
                    "outer_read_event": read_before.get(key),
                    "outer_write_event": write_after.get(key),
                },
            )
    return None


def detect_reentrancy_all(outcomes: Sequence) -> list[Finding]:
    """One finding per (schedule, tx) that exhibits interference."""
    findings = []
    for outcome in sorted(outcomes, key=lambda o: o.schedule_id):
        for i, s in enumerate(outcome.steps):
            f = detect_reentrancy(s.trace)
            if f is not None:
                f.witness = {"schedule": outcome.schedule_id, "tx": i, **f.witness}
                f.summary = f"schedule {outcome.schedule_id}, tx {i}: {f.summary}"
                findings.append(f)
    return findings
