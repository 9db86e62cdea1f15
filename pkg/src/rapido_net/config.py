"""Simulation configuration and seed derivation.

Config files are flat ``key = value`` text; dots in keys map to
underscores in :class:`SimConfig` field names (``beacon.count`` ->
``beacon_count``).  Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields, replace
from pathlib import Path


def derive_seed(*parts) -> int:
    """Stable 64-bit sub-seed from arbitrary labeled parts.

    Python's builtin ``hash`` is salted per process, so sub-streams are
    derived from SHA-256 instead.
    """
    blob = "|".join(repr(p) for p in parts).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")


@dataclass(frozen=True)
class FeeBudgetPolicy:
    """Fee ceiling for a payment, fixed or keyed by payment size.

    ``adaptive`` holds (bucket_value, budget) pairs sorted by bucket; a
    payment uses the budget of the smallest bucket >= its value, or the
    last bucket's budget beyond the largest.
    """

    kind: str = "fixed"  # "fixed" | "adaptive"
    fixed_value: int = 200
    adaptive: tuple[tuple[int, int], ...] = ()

    def budget_for(self, amount: int) -> int:
        if self.kind == "fixed":
            return self.fixed_value
        for bucket, budget in self.adaptive:
            if amount <= bucket:
                return budget
        return self.adaptive[-1][1]

    @staticmethod
    def parse(text: str) -> "FeeBudgetPolicy":
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        if kind == "fixed":
            return FeeBudgetPolicy(kind="fixed", fixed_value=int(rest))
        if kind == "adaptive":
            pairs = []
            for item in rest.split(","):
                bucket, _, budget = item.partition("=")
                pairs.append((int(bucket), int(budget)))
            pairs.sort()
            return FeeBudgetPolicy(kind="adaptive", adaptive=tuple(pairs))
        raise ValueError(f"unknown fee budget policy {text!r}")


@dataclass
class SimConfig:
    """Knobs shared by routing, splitting, the contract engine and the ledger."""

    # beacon election
    beacon_count: int = 200
    beacon_period_hours: int = 12
    beacon_seed: int = 0

    # routing
    routing_max_candidates: int = 10

    # value split
    vdp_threshold: float = 0.95
    vdp_threshold_mode: str = "upper"  # "upper" | "lower" | "off"
    vdp_fee_budget_policy: str = "fixed:200"
    vdp_participation_prob: float = 1.0
    vdp_exact_subset_limit: int = 4

    # simulated chain
    ledger_open_fee: int = 1000
    ledger_close_fee: int = 1000
    ledger_confirmation_delay: int = 6  # simulated hours per on-chain claim
    ledger_initial_onchain: int = 1_000_000

    # contract engine
    dhtlc_hop_delta: int = 24  # hours between consecutive expiries
    dhtlc_cash_multiplier: int = 10
    dhtlc_contract_deadline: int = 2

    # synthetic topology
    synth_capacity_min: int = 10_000
    synth_capacity_max: int = 1_500_000

    def fee_budget_policy(self) -> FeeBudgetPolicy:
        return FeeBudgetPolicy.parse(self.vdp_fee_budget_policy)

    def with_updates(self, **kw) -> "SimConfig":
        return replace(self, **kw)


_FIELD_TYPES = {f.name: f.type for f in fields(SimConfig)}


def _coerce(name: str, raw: str):
    typ = _FIELD_TYPES[name]
    if typ in ("int", int):
        return int(raw)
    if typ in ("float", float):
        return float(raw)
    return raw


def parse_flat_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines, ignoring blanks and ``#`` comments."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def sim_config_from_items(items: dict[str, str]) -> tuple[SimConfig, dict[str, str]]:
    """Build a SimConfig from flat items; returns leftover non-sim keys."""
    cfg = SimConfig()
    updates = {}
    leftover = {}
    for key, value in items.items():
        name = key.replace(".", "_")
        if name in _FIELD_TYPES:
            updates[name] = _coerce(name, value)
        else:
            leftover[key] = value
    return cfg.with_updates(**updates), leftover


def load_sim_config(path: str | Path) -> SimConfig:
    cfg, leftover = sim_config_from_items(parse_flat_config(Path(path).read_text()))
    # leftover keys belong to the experiment layer; validated there
    return cfg
