"""Scenario files: JSON documents naming corpus contracts and client strategies."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from ccsim.corpus import CONTRACTS, STRATEGIES, get_contract, make_client
from ccsim.runtime import (
    DEFAULT_DEPTH_CAP,
    DEFAULT_STEP_BUDGET,
    INVOKE_FALLBACK,
    SEND_MODES,
    RuntimeConfig,
)
from ccsim.world import WorldState


class ScenarioError(ValueError):
    """The scenario document is malformed or names something unknown."""


SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["name", "contracts", "clients"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "units": {"type": "string"},
        "accounts": {
            "type": "object",
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
        "contracts": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["type"],
                "additionalProperties": False,
                "properties": {
                    "type": {"type": "string"},
                    "balance": {"type": "integer", "minimum": 0},
                    "params": {"type": "object"},
                },
            },
        },
        "clients": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "address", "strategy"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "pattern": "^[A-Za-z0-9_-]+$"},
                    "address": {"type": "string"},
                    "strategy": {"type": "string"},
                    "params": {"type": "object"},
                },
            },
        },
        "oracle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "address": {"type": "string"},
                "results": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 9}},
                "seed": {"type": "integer"},
            },
        },
        "send_mode": {"enum": list(SEND_MODES)},
        "step_budget": {"type": "integer", "minimum": 1},
        "depth_cap": {"type": "integer", "minimum": 1},
        "block_size": {"type": ["integer", "null"], "minimum": 1},
        "base_block_number": {"type": "integer", "minimum": 0},
        "watched": {"type": "array", "items": {"type": "string"}},
        "bounds": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_schedules": {"type": "integer", "minimum": 1},
                "max_txs_per_client": {"type": "integer", "minimum": 1},
            },
        },
        "checks": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "liveness": {
                    "type": "object",
                    "required": ["client", "method"],
                    "properties": {"client": {"type": "string"}, "method": {"type": "string"}},
                },
                "counter": {
                    "type": "object",
                    "required": ["contract"],
                    "properties": {"contract": {"type": "string"}, "key": {"type": "string"}},
                },
                "linearizability": {
                    "type": "object",
                    "required": ["spec"],
                    "properties": {
                        "spec": {"type": "string"},
                        "contract": {"type": "string"},
                        "granularity": {"enum": ["tx", "span"]},
                    },
                },
            },
        },
    },
}


@dataclass
class Scenario:
    name: str
    contracts: dict[str, dict]
    clients: list[dict]
    accounts: dict[str, int] = field(default_factory=dict)
    description: str = ""
    units: str = "wei"
    oracle_address: str = "oracle"
    oracle_results: list[int] | None = None
    oracle_seed: int = 0
    send_mode: str = INVOKE_FALLBACK
    step_budget: int = DEFAULT_STEP_BUDGET
    depth_cap: int = DEFAULT_DEPTH_CAP
    block_size: int | None = None
    base_block_number: int = 0
    watched: list[str] | None = None
    max_schedules: int = 100_000
    max_txs_per_client: int = 32
    checks: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, spec in self.contracts.items():
            if spec["type"] not in CONTRACTS:
                raise ScenarioError(f"contract {name!r}: unknown contract type {spec['type']!r}")
        seen = set()
        for c in self.clients:
            if c["strategy"] not in STRATEGIES:
                raise ScenarioError(f"client {c['id']!r}: unknown strategy {c['strategy']!r}")
            if c["id"] in seen:
                raise ScenarioError(f"duplicate client id {c['id']!r}")
            seen.add(c["id"])
            if c["address"] not in self.accounts and c["address"] not in self.contracts:
                raise ScenarioError(f"client {c['id']!r}: unknown address {c['address']!r}")
        if self.block_size is not None and self.block_size < 1:
            raise ScenarioError("block_size must be positive")
        if self.max_schedules < 1 or self.max_txs_per_client < 1:
            raise ScenarioError("exploration bounds must be positive")
        for addr in self.watched or []:
            if addr not in self.accounts and addr not in self.contracts:
                raise ScenarioError(f"watched address {addr!r} is not declared")
        if self.oracle_results is not None and any(not 1 <= r <= 9 for r in self.oracle_results):
            raise ScenarioError("oracle results must lie in 1..9")

    @property
    def config(self) -> RuntimeConfig:
        return RuntimeConfig(self.send_mode, self.depth_cap, self.oracle_address)

    @property
    def watched_addresses(self) -> list[str]:
        if self.watched is not None:
            return sorted(self.watched)
        return sorted(self.contracts)

    def with_overrides(self, **changes) -> Scenario:
        changes = {k: v for k, v in changes.items() if v is not None}
        if "block_size" in changes and changes["block_size"] == 0:
            changes["block_size"] = None
        return replace(self, **changes)

    def build_world(self) -> WorldState:
        world = WorldState(block_number=self.base_block_number)
        for addr in sorted(self.accounts):
            world.add_account(addr, self.accounts[addr])
        if self.oracle_address not in world.accounts:
            world.add_account(self.oracle_address, 0)
        for addr in sorted(self.contracts):
            spec = self.contracts[addr]
            try:
                storage = get_contract(spec["type"]).init(dict(spec.get("params", {})))
            except ValueError as exc:
                raise ScenarioError(f"contract {addr!r}: {exc}") from None
            world.deploy(addr, spec["type"], storage, spec.get("balance", 0))
        return world

    def build_clients(self) -> dict:
        out = {}
        for c in self.clients:
            try:
                out[c["id"]] = make_client(c["strategy"], c["id"], c["address"],
                                           dict(c.get("params", {})), self.step_budget)
            except TypeError as exc:
                raise ScenarioError(f"client {c['id']!r}: bad params ({exc})") from None
        return out

    def oracle_result(self, query_id: int) -> int:
        if self.oracle_results and query_id <= len(self.oracle_results):
            return self.oracle_results[query_id - 1]
        # str seeds are hashed deterministically by random.Random
        return random.Random(f"{self.oracle_seed}:{query_id}").randint(1, 9)


def from_dict(doc: dict) -> Scenario:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"{path}: {exc.message}") from None
    oracle = doc.get("oracle", {})
    bounds = doc.get("bounds", {})
    kw = dict(
        name=doc["name"],
        description=doc.get("description", ""),
        units=doc.get("units", "wei"),
        accounts=dict(doc.get("accounts", {})),
        contracts={k: dict(v) for k, v in doc["contracts"].items()},
        clients=[dict(c) for c in doc["clients"]],
        oracle_address=oracle.get("address", "oracle"),
        oracle_results=oracle.get("results"),
        oracle_seed=oracle.get("seed", 0),
        send_mode=doc.get("send_mode", INVOKE_FALLBACK),
        step_budget=doc.get("step_budget", DEFAULT_STEP_BUDGET),
        depth_cap=doc.get("depth_cap", DEFAULT_DEPTH_CAP),
        block_size=doc.get("block_size"),
        base_block_number=doc.get("base_block_number", 0),
        watched=doc.get("watched"),
        checks=dict(doc.get("checks", {})),
    )
    if "max_schedules" in bounds:
        kw["max_schedules"] = bounds["max_schedules"]
    if "max_txs_per_client" in bounds:
        kw["max_txs_per_client"] = bounds["max_txs_per_client"]
    return Scenario(**kw)


def packaged_scenarios() -> list[str]:
    root = resources.files("ccsim") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load(path: str | Path) -> Scenario:
    """Load a scenario file; a bare name falls back to the packaged pack."""
    p = Path(path)
    if not p.exists():
        name = p.name[:-5] if p.name.endswith(".json") else p.name
        packaged = resources.files("ccsim") / "scenarios" / f"{name}.json"
        if not packaged.is_file():
            raise ScenarioError(f"no such scenario file: {path}")
        text = packaged.read_text()
    else:
        text = p.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from None
    return from_dict(doc)
