"""BlockKing outcomes as a function of block size and the oracle's draws.

A gambler wins only when the random number equals warriorBlock % 10, so
block assembly decides who can win at all.
"""

import argparse
import json
from pathlib import Path

from ccsim.explorer import explore_exhaustive
from ccsim.report import analyze
from ccsim.scenario import from_dict

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--block-sizes", nargs="+", default=["inf", "1", "2"])
    ap.add_argument("--results", type=int, nargs="+", default=[7, 8])
    args = ap.parse_args()

    doc = json.loads((SCENARIOS / "blockking_race.json").read_text())
    for r in args.results:
        for bs in args.block_sizes:
            doc["oracle"]["results"] = [r, r]
            doc["block_size"] = None if bs == "inf" else int(bs)
            sc = from_dict(doc)
            ex = explore_exhaustive(sc)
            kings = sorted({o.world.load("blockking", "king") for o in ex.outcomes})
            kinds = sorted({f["kind"] for f in analyze(sc, ex)["findings"]})
            print(f"random={r} block_size={bs:>3}: {len(ex)} schedules, kings={kings}, "
                  f"findings={kinds}")


if __name__ == "__main__":
    main()
