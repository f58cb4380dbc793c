"""Attacker gain on DAO and FixedDAO over re-entry bound and depth cap.

Prints one row per (reentries, depth_cap) with the measured gain next to
the closed form (1 + min(r, cap - 1)) * stake, capped by the pool.
"""

import argparse
import copy
import json
from pathlib import Path

from ccsim.explorer import explore_exhaustive
from ccsim.scenario import from_dict

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def gain(doc: dict, contract_type: str, reentries: int, depth_cap: int) -> int:
    doc = copy.deepcopy(doc)
    doc["contracts"]["dao"]["type"] = contract_type
    doc["contracts"]["attacker"]["params"]["reentries"] = reentries
    doc["depth_cap"] = depth_cap
    (outcome,) = explore_exhaustive(from_dict(doc)).outcomes
    return outcome.payouts["attacker"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-reentries", type=int, default=12)
    ap.add_argument("--caps", type=int, nargs="+", default=[2, 4, 6, 8])
    args = ap.parse_args()

    doc = json.loads((SCENARIOS / "dao.json").read_text())
    stake = doc["contracts"]["dao"]["params"]["balances"]["attacker"]
    pool = doc["contracts"]["dao"]["balance"]
    print(f"stake={stake} pool={pool}")
    print(f"{'r':>3} {'cap':>4} {'DAO':>5} {'formula':>8} {'FixedDAO':>9}")
    for cap in args.caps:
        for r in range(args.max_reentries + 1):
            expected = min((1 + min(r, cap - 1)) * stake, pool)
            got = gain(doc, "DAO", r, cap)
            fixed = gain(doc, "FixedDAO", r, cap)
            flag = "" if got == expected else "  MISMATCH"
            print(f"{r:>3} {cap:>4} {got:>5} {expected:>8} {fixed:>9}{flag}")


if __name__ == "__main__":
    main()
