from ccsim.corpus.clients import STRATEGIES, Client, make_client
from ccsim.corpus.contracts import CONTRACTS, ContractSpec, get_contract
from ccsim.corpus.specs import SPECS, SequentialSpec, get_spec


def registry_listing() -> str:
    lines = []
    for name in sorted(CONTRACTS):
        spec = CONTRACTS[name]
        methods = ", ".join(sorted(spec.methods))
        if spec.fallback is not None:
            methods += ", <fallback>"
        lines.append(f"{name:<14} {spec.figure:<52} {methods}")
        lines.append(f"{'':<14} {spec.summary}")
    lines.append("")
    lines.append("strategies: " + ", ".join(sorted(STRATEGIES)))
    lines.append("sequential specs: " + ", ".join(sorted(SPECS)))
    return "\n".join(lines) + "\n"


__all__ = [
    "CONTRACTS", "ContractSpec", "get_contract",
    "STRATEGIES", "Client", "make_client",
    "SPECS", "SequentialSpec", "get_spec",
    "registry_listing",
]
