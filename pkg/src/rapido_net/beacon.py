"""Beacon election: partition the node set and draw one landmark per portion.

Portioning is a keyed-hash shuffle chunked into near-equal slices, so it
is deterministic, balanced, and independent of topology.  Elections are
uniform within each portion and rotate with the epoch index.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .config import derive_seed
from .topology import ChannelGraph, NodeId


@dataclass(frozen=True)
class BeaconEpoch:
    epoch_index: int
    period_length: int
    beacons: tuple[NodeId, ...]  # one per portion, portion order
    seed: int

    @property
    def beacon_set(self) -> frozenset:
        return frozenset(self.beacons)


def partition_topology(graph: ChannelGraph, h: int, seed: int) -> list[list[NodeId]]:
    """Split nodes into min(h, n) disjoint portions with sizes differing by <= 1."""
    if h < 1:
        raise ValueError("portion count must be >= 1")
    nodes = graph.nodes()
    n = len(nodes)
    if n == 0:
        return []
    nodes.sort(key=lambda node: (derive_seed(seed, node), node))
    h_eff = min(h, n)
    base, extra = divmod(n, h_eff)
    portions = []
    pos = 0
    for idx in range(h_eff):
        size = base + (1 if idx < extra else 0)
        portions.append(sorted(nodes[pos:pos + size]))
        pos += size
    return portions


def elect_beacons(portions: list[list[NodeId]], epoch_index: int, seed: int,
                  period_length: int = 12) -> BeaconEpoch:
    """Draw one node uniformly from each portion, seeded per (seed, epoch, portion)."""
    if not portions:
        raise ValueError("no portions to elect from")
    chosen = []
    for p_idx, portion in enumerate(portions):
        if not portion:
            raise ValueError(f"portion {p_idx} is empty")
        rng = random.Random(derive_seed(seed, epoch_index, p_idx))
        chosen.append(portion[rng.randrange(len(portion))])
    return BeaconEpoch(epoch_index=epoch_index, period_length=period_length,
                       beacons=tuple(chosen), seed=seed)


def epoch_for(graph: ChannelGraph, h: int, epoch_index: int, seed: int,
              period_length: int = 12) -> BeaconEpoch:
    """Partition + elect in one step."""
    return elect_beacons(partition_topology(graph, h, seed), epoch_index, seed,
                         period_length=period_length)
