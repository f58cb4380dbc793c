from __future__ import annotations

from dataclasses import dataclass, field

TOD = "TOD"
LOST_UPDATE = "LostUpdate"
REENTRANCY = "ReentrancyInterference"
SPEC_VIOLATION = "SpecViolation"
NON_LINEARIZABLE = "NonLinearizable"
STARVATION_NEVER = "StarvationNever"
CONSERVATION_BREACH = "ConservationBreach"

KINDS = (TOD, LOST_UPDATE, REENTRANCY, SPEC_VIOLATION, NON_LINEARIZABLE,
         STARVATION_NEVER, CONSERVATION_BREACH)
DEFAULT_FAILING_KINDS = (TOD, LOST_UPDATE, REENTRANCY, CONSERVATION_BREACH)


@dataclass
class Finding:
    kind: str
    summary: str
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "summary": self.summary, "witness": self.witness}
