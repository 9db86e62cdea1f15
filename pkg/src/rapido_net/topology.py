"""Channel-graph data model, snapshot ingestion and synthetic topologies.

A channel pools the deposits of its two endpoints: ``balance_a +
balance_b == capacity`` holds at all times, and every transfer just
moves satoshis between the two sides.  Fee policies live on nodes.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import IO, Iterable

NodeId = str
ChannelKey = tuple[str, str]  # sorted endpoint pair


class MalformedSnapshot(Exception):
    """Snapshot stream is not valid for ingestion."""


class DanglingEndpoint(Exception):
    """A channel references a node absent from the node set."""


class InfeasibleShape(Exception):
    """Requested synthetic topology cannot be connected."""


class InsufficientBalance(Exception):
    """A transfer exceeds the sender's side of the channel."""


@dataclass(frozen=True)
class FeePolicy:
    """Forwarding fee charged by a node: base plus parts-per-million of value."""

    base_fee: int = 0
    fee_rate_ppm: int = 0

    def fee(self, amount: int) -> int:
        return self.base_fee + (amount * self.fee_rate_ppm) // 1_000_000


ZERO_FEE = FeePolicy(0, 0)


@dataclass
class Channel:
    endpoint_a: NodeId
    endpoint_b: NodeId
    capacity: int
    balance_a: int = 0
    balance_b: int = 0

    def __post_init__(self):
        if self.endpoint_a == self.endpoint_b:
            raise ValueError("channel endpoints must differ")
        if self.capacity <= 0:
            raise ValueError("channel capacity must be positive")

    @property
    def key(self) -> ChannelKey:
        a, b = sorted((self.endpoint_a, self.endpoint_b))
        return (a, b)

    def balance_of(self, node: NodeId) -> int:
        if node == self.endpoint_a:
            return self.balance_a
        if node == self.endpoint_b:
            return self.balance_b
        raise KeyError(f"{node} is not an endpoint of {self.key}")

    def other(self, node: NodeId) -> NodeId:
        if node == self.endpoint_a:
            return self.endpoint_b
        if node == self.endpoint_b:
            return self.endpoint_a
        raise KeyError(f"{node} is not an endpoint of {self.key}")

    def set_balance(self, node: NodeId, value: int) -> None:
        if node == self.endpoint_a:
            self.balance_a = value
        elif node == self.endpoint_b:
            self.balance_b = value
        else:
            raise KeyError(f"{node} is not an endpoint of {self.key}")


@dataclass
class ChannelGraph:
    """Nodes with fee policies plus one channel per unordered node pair."""

    policies: dict[NodeId, FeePolicy] = field(default_factory=dict)
    channels: dict[ChannelKey, Channel] = field(default_factory=dict)
    adjacency: dict[NodeId, list[NodeId]] = field(default_factory=dict)

    # ---------- construction ----------

    def add_node(self, node: NodeId, policy: FeePolicy = ZERO_FEE) -> None:
        self.policies[node] = policy
        self.adjacency.setdefault(node, [])

    def add_channel(self, a: NodeId, b: NodeId, capacity: int,
                    balance_a: int | None = None) -> Channel:
        if a not in self.policies or b not in self.policies:
            raise DanglingEndpoint(f"channel ({a}, {b}) references an unknown node")
        key = tuple(sorted((a, b)))
        existing = self.channels.get(key)
        if existing is not None:
            # parallel channels merge by pooling capacity
            existing.capacity += capacity
            existing.balance_a = 0
            existing.balance_b = 0
            return existing
        ch = Channel(key[0], key[1], capacity)
        if balance_a is not None:
            if not 0 <= balance_a <= capacity:
                raise ValueError("balance outside capacity")
            ch.balance_a = balance_a
            ch.balance_b = capacity - balance_a
        self.channels[key] = ch
        self.adjacency[key[0]].append(key[1])
        self.adjacency[key[1]].append(key[0])
        return ch

    def remove_channel(self, key: ChannelKey) -> Channel:
        ch = self.channels.pop(key)
        self.adjacency[key[0]].remove(key[1])
        self.adjacency[key[1]].remove(key[0])
        return ch

    # ---------- accessors ----------

    @property
    def node_count(self) -> int:
        return len(self.policies)

    @property
    def channel_count(self) -> int:
        return len(self.channels)

    def nodes(self) -> list[NodeId]:
        return sorted(self.policies)

    def policy(self, node: NodeId) -> FeePolicy:
        return self.policies[node]

    def channel_between(self, a: NodeId, b: NodeId) -> Channel | None:
        return self.channels.get(tuple(sorted((a, b))))

    def degree(self, node: NodeId) -> int:
        return len(self.adjacency.get(node, []))

    def neighbors(self, node: NodeId) -> list[NodeId]:
        return sorted(self.adjacency.get(node, []))

    def total_capacity(self) -> int:
        return sum(ch.capacity for ch in self.channels.values())

    def copy(self) -> "ChannelGraph":
        g = ChannelGraph()
        g.policies = dict(self.policies)
        g.channels = {
            k: Channel(c.endpoint_a, c.endpoint_b, c.capacity, c.balance_a, c.balance_b)
            for k, c in self.channels.items()
        }
        g.adjacency = {n: list(nbrs) for n, nbrs in self.adjacency.items()}
        return g

    def snapshot_dict(self) -> dict:
        """Serialize topology (no balances) in the snapshot JSON shape."""
        return {
            "nodes": [
                {
                    "id": n,
                    "base_fee_msat": self.policies[n].base_fee * 1000,
                    "fee_rate_ppm": self.policies[n].fee_rate_ppm,
                }
                for n in self.nodes()
            ],
            "channels": [
                {"a": k[0], "b": k[1], "capacity_sat": ch.capacity}
                for k, ch in sorted(self.channels.items())
            ],
        }


# ---------- ingestion ----------

def load_graph(snapshot: bytes | str | IO) -> ChannelGraph:
    """Build a graph from a snapshot JSON stream.

    Balances stay zero/zero until :func:`assign_deposits` runs.  Base
    fees arrive in millisatoshis and are floored to satoshis.
    """
    if hasattr(snapshot, "read"):
        snapshot = snapshot.read()
    try:
        data = json.loads(snapshot)
        nodes = data["nodes"]
        channels = data["channels"]
        if not isinstance(nodes, list) or not isinstance(channels, list):
            raise TypeError("nodes/channels must be arrays")
    except (json.JSONDecodeError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise MalformedSnapshot(str(exc)) from exc

    graph = ChannelGraph()
    try:
        for entry in nodes:
            graph.add_node(
                str(entry["id"]),
                FeePolicy(int(entry["base_fee_msat"]) // 1000, int(entry["fee_rate_ppm"])),
            )
        for entry in channels:
            a, b = str(entry["a"]), str(entry["b"])
            if a not in graph.policies or b not in graph.policies:
                raise DanglingEndpoint(f"channel ({a}, {b}) references an unknown node")
            graph.add_channel(a, b, int(entry["capacity_sat"]))
    except DanglingEndpoint:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedSnapshot(str(exc)) from exc
    return graph


# ---------- synthetic topology ----------

def generate_synthetic_graph(node_count: int, channel_count: int, seed: int,
                             capacity_min: int = 10_000,
                             capacity_max: int = 1_500_000) -> ChannelGraph:
    """Connected preferential-attachment topology, deterministic in seed.

    A spanning tree guarantees connectivity; the remaining channels
    attach both ends preferentially so a few heavily-connected hubs
    emerge, mirroring real hub-and-spoke channel networks.  Capacities
    are log-uniform in [capacity_min, capacity_max].
    """
    if node_count < 1:
        raise InfeasibleShape("need at least one node")
    if channel_count < node_count - 1:
        raise InfeasibleShape(
            f"{channel_count} channels cannot connect {node_count} nodes")
    max_edges = node_count * (node_count - 1) // 2
    if channel_count > max_edges:
        raise InfeasibleShape(f"at most {max_edges} channels fit {node_count} nodes")

    rng = random.Random(seed)
    width = len(str(node_count - 1))
    ids = [f"n{idx:0{width}d}" for idx in range(node_count)]

    graph = ChannelGraph()
    log_lo, log_hi = math.log(capacity_min), math.log(capacity_max)
    for node in ids:
        base = rng.choice((0, 1000)) // 1000
        rate = int(math.exp(rng.uniform(math.log(10), math.log(500))))
        graph.add_node(node, FeePolicy(base, rate))

    def capacity() -> int:
        return int(math.exp(rng.uniform(log_lo, log_hi)))

    edges: set[ChannelKey] = set()
    bag: list[int] = [0]  # endpoint multiset; sampling it is degree-proportional

    def link(i: int, j: int) -> None:
        graph.add_channel(ids[i], ids[j], capacity())
        edges.add(tuple(sorted((ids[i], ids[j]))))
        bag.extend((i, j))

    for i in range(1, node_count):
        link(i, rng.choice(bag))

    attempts = 0
    while len(edges) < channel_count:
        u, v = rng.choice(bag), rng.choice(bag)
        attempts += 1
        if u == v or tuple(sorted((ids[u], ids[v]))) in edges:
            if attempts > 50 * channel_count:
                # dense corner: fill remaining slots deterministically
                for i in range(node_count):
                    for j in range(i + 1, node_count):
                        if len(edges) >= channel_count:
                            break
                        if tuple(sorted((ids[i], ids[j]))) not in edges:
                            link(i, j)
                break
            continue
        link(u, v)
    return graph


# ---------- deposits and transfers ----------

def assign_deposits(graph: ChannelGraph) -> ChannelGraph:
    """Split every capacity 80/20 in favor of the better-connected endpoint.

    Equal degrees split 50/50, odd satoshi to the lexicographically
    smaller endpoint.  Idempotent: depends only on capacities/degrees.
    """
    for ch in graph.channels.values():
        deg_a = graph.degree(ch.endpoint_a)
        deg_b = graph.degree(ch.endpoint_b)
        if deg_a > deg_b:
            ch.balance_a = (ch.capacity * 8) // 10
        elif deg_b > deg_a:
            ch.balance_a = ch.capacity - (ch.capacity * 8) // 10
        else:
            # endpoint_a is the smaller id by construction
            ch.balance_a = ch.capacity - ch.capacity // 2
        ch.balance_b = ch.capacity - ch.balance_a
    return graph


def apply_transfer(graph: ChannelGraph, channel: Channel | ChannelKey,
                   from_node: NodeId, amount: int) -> ChannelGraph:
    """Move ``amount`` from one side of a channel to the other."""
    if not isinstance(channel, Channel):
        channel = graph.channels[channel]
    if amount < 0:
        raise ValueError("transfer amount must be nonnegative")
    have = channel.balance_of(from_node)
    if have < amount:
        raise InsufficientBalance(
            f"{from_node} holds {have} < {amount} in {channel.key}")
    to_node = channel.other(from_node)
    channel.set_balance(from_node, have - amount)
    channel.set_balance(to_node, channel.balance_of(to_node) + amount)
    return graph
