from ccsim.detectors.conservation import audit_conservation
from ccsim.detectors.findings import (
    CONSERVATION_BREACH,
    DEFAULT_FAILING_KINDS,
    KINDS,
    LOST_UPDATE,
    NON_LINEARIZABLE,
    REENTRANCY,
    SPEC_VIOLATION,
    STARVATION_NEVER,
    TOD,
    Finding,
)
from ccsim.detectors.linearizability import (
    LINEARIZABLE,
    MAX_OPS,
    UNKNOWN,
    LinResult,
    Operation,
    check_linearizability,
    history_from_outcome,
    replay_sequential,
)
from ccsim.detectors.liveness import ALWAYS, NEVER, SOMETIMES, LivenessResult, probe_liveness
from ccsim.detectors.ordering import detect_lost_update, detect_tod, lost_updates_in
from ccsim.detectors.reentrancy import detect_reentrancy, detect_reentrancy_all

__all__ = [
    "Finding", "KINDS", "DEFAULT_FAILING_KINDS",
    "TOD", "LOST_UPDATE", "REENTRANCY", "SPEC_VIOLATION", "NON_LINEARIZABLE",
    "STARVATION_NEVER", "CONSERVATION_BREACH",
    "detect_tod", "detect_lost_update", "lost_updates_in",
    "detect_reentrancy", "detect_reentrancy_all",
    "check_linearizability", "replay_sequential", "history_from_outcome", "Operation",
    "LinResult", "LINEARIZABLE", "UNKNOWN", "MAX_OPS",
    "probe_liveness", "LivenessResult", "ALWAYS", "SOMETIMES", "NEVER",
    "audit_conservation",
]
