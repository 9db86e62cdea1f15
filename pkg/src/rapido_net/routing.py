"""Routing: proactive tables to beacons, reactive probes, candidate paths,
and the single-path fee-weighted baseline router.

Proactive tables hold one hop-minimal route per reachable beacon (BFS,
ties broken toward the lexicographically smallest next hop).  Candidate
customer->merchant paths are beacon compositions: the customer's route
to a beacon concatenated with the reverse of the merchant's, cycles
spliced out.  The baseline router is a destination-to-source Dijkstra
where an edge costs the fee for forwarding the amount plus everything
accrued downstream, restricted to hops the sender can actually fund.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .beacon import BeaconEpoch
from .topology import Channel, ChannelGraph, ChannelKey, FeePolicy, NodeId


class NoCandidatePath(Exception):
    """No beacon composition yields a usable customer->merchant path."""


class StaleRoute(Exception):
    """A route references a channel or epoch that no longer exists."""


class NoRoute(Exception):
    """No fee-and-balance-feasible single path exists."""


@dataclass(frozen=True)
class Route:
    hops: tuple[NodeId, ...]
    channels: tuple[ChannelKey, ...]

    @property
    def length(self) -> int:
        return len(self.channels)

    @property
    def source(self) -> NodeId:
        return self.hops[0]

    @property
    def destination(self) -> NodeId:
        return self.hops[-1]


def make_route(graph: ChannelGraph, hops: list[NodeId]) -> Route:
    keys = []
    for u, v in zip(hops, hops[1:]):
        ch = graph.channel_between(u, v)
        if ch is None:
            raise StaleRoute(f"no channel between {u} and {v}")
        keys.append(ch.key)
    return Route(tuple(hops), tuple(keys))


@dataclass
class RoutingTable:
    owner: NodeId
    entries: dict[NodeId, Route]  # beacon -> route owner..beacon
    epoch_index: int


@dataclass
class PathProbe:
    """Live per-hop channel state along a route.

    For hop j (hops[j] -> hops[j+1]) the probe reports both sides of the
    channel: ``send_deposits[j]`` is the forwarding node's balance (what
    it can push) and ``recv_deposits[j]`` the receiving node's balance.
    ``fee_policies[j]`` is the receiving node's policy; the last entry
    belongs to the destination and never charges.
    """

    route: Route
    send_deposits: list[int]
    recv_deposits: list[int]
    fee_policies: list[FeePolicy]

    @property
    def bottleneck(self) -> int:
        return min(self.send_deposits) if self.send_deposits else 0

    def intermediaries(self) -> tuple[NodeId, ...]:
        return self.route.hops[1:-1]


# ---------- proactive part ----------

class RoutingState:
    """Per-epoch BFS state; materializes RoutingTable objects on demand.

    Distances to every beacon come from one batched unweighted
    shortest-path call.  Next-hop pointers toward each beacon (smallest
    node id among distance-decreasing neighbors) are built lazily per
    beacon with vectorized group-minima, so route extraction is a plain
    pointer walk.
    """

    def __init__(self, graph: ChannelGraph, epoch: BeaconEpoch):
        self.graph = graph
        self.epoch = epoch
        self._order = graph.nodes()
        self._index = {n: i for i, n in enumerate(self._order)}
        n = len(self._order)
        rows, cols = [], []
        for key in graph.channels:
            i, j = self._index[key[0]], self._index[key[1]]
            rows.extend((i, j))
            cols.extend((j, i))
        self._src = np.asarray(rows, dtype=np.int64)
        self._dst = np.asarray(cols, dtype=np.int64)
        mat = csr_matrix((np.ones(len(rows), dtype=np.int8),
                          (self._src, self._dst)), shape=(n, n))
        beacons = sorted(set(epoch.beacons))
        idxs = [self._index[b] for b in beacons]
        if idxs:
            dist = shortest_path(mat, method="D", directed=False, unweighted=True,
                                 indices=idxs)
            dist = np.atleast_2d(dist)
        else:
            dist = np.zeros((0, n))
        self._dist = {b: dist[k] for k, b in enumerate(beacons)}
        self._next: dict[NodeId, np.ndarray] = {}

    def distance(self, node: NodeId, beacon: NodeId) -> float:
        return float(self._dist[beacon][self._index[node]])

    def _next_hops(self, beacon: NodeId) -> np.ndarray:
        cached = self._next.get(beacon)
        if cached is not None:
            return cached
        dist = self._dist[beacon]
        n = len(self._order)
        nxt = np.full(n, n, dtype=np.int64)  # n = sentinel "no next hop"
        if len(self._src):
            towards = dist[self._dst] == dist[self._src] - 1
            np.minimum.at(nxt, self._src[towards], self._dst[towards])
        self._next[beacon] = nxt
        return nxt

    def hops_to_beacon(self, node: NodeId, beacon: NodeId) -> list[NodeId] | None:
        d = self._dist[beacon][self._index[node]]
        if not np.isfinite(d):
            return None
        nxt = self._next_hops(beacon)
        hops = [node]
        cur = self._index[node]
        for _ in range(int(d)):
            cur = int(nxt[cur])
            hops.append(self._order[cur])
        return hops

    def route_to_beacon(self, node: NodeId, beacon: NodeId) -> Route | None:
        hops = self.hops_to_beacon(node, beacon)
        return None if hops is None else make_route(self.graph, hops)

    def table(self, node: NodeId) -> RoutingTable:
        entries = {}
        for b in sorted(set(self.epoch.beacons)):
            route = self.route_to_beacon(node, b)
            if route is not None:
                entries[b] = route
        return RoutingTable(owner=node, entries=entries,
                            epoch_index=self.epoch.epoch_index)

    def __getitem__(self, node: NodeId) -> RoutingTable:
        return self.table(node)


def proactive_update(graph: ChannelGraph, epoch: BeaconEpoch) -> RoutingState:
    """Refresh every node's routes to the epoch's beacons."""
    for b in epoch.beacons:
        if b not in graph.policies:
            raise KeyError(f"beacon {b} not in graph")
    return RoutingState(graph, epoch)


# ---------- composition ----------

def splice_out_cycles(hops: list[NodeId]) -> list[NodeId]:
    """Remove loops: when a node repeats, cut everything between visits."""
    out: list[NodeId] = []
    seen: dict[NodeId, int] = {}
    for node in hops:
        if node in seen:
            cut = seen[node]
            for dropped in out[cut + 1:]:
                del seen[dropped]
            del out[cut + 1:]
        else:
            seen[node] = len(out)
            out.append(node)
    return out


def _composed_hops(state: RoutingState, customer: NodeId, merchant: NodeId,
                   beacon: NodeId) -> list[NodeId] | None:
    up = state.hops_to_beacon(customer, beacon)
    down = state.hops_to_beacon(merchant, beacon)
    if up is None or down is None:
        return None
    hops = splice_out_cycles(up + down[::-1][1:])
    if len(hops) < 2 or hops[0] != customer or hops[-1] != merchant:
        return None
    return hops


def candidate_paths(state: RoutingState, customer: NodeId, merchant: NodeId,
                    epoch: BeaconEpoch, max_candidates: int | None = 10) -> list[Route]:
    """Beacon-composed simple paths customer->merchant, shortest first.

    Orders by (length, beacon id), deduplicates identical hop sequences,
    and truncates to ``max_candidates`` (None keeps everything).
    """
    if state.epoch.epoch_index != epoch.epoch_index:
        raise StaleRoute("routing state belongs to a different epoch")
    scored: list[tuple[int, NodeId, tuple[NodeId, ...]]] = []
    seen: set[tuple[NodeId, ...]] = set()
    for b in sorted(set(epoch.beacons)):
        hops = _composed_hops(state, customer, merchant, b)
        if hops is None:
            continue
        key = tuple(hops)
        if key in seen:
            continue
        seen.add(key)
        scored.append((len(hops) - 1, b, key))
    if not scored:
        raise NoCandidatePath(f"no common beacon connects {customer} and {merchant}")
    scored.sort(key=lambda item: (item[0], item[1]))
    if max_candidates is not None:
        scored = scored[:max_candidates]
    return [make_route(state.graph, list(hops)) for _, _, hops in scored]


def composed_route_lengths(state: RoutingState, customer: NodeId,
                           merchant: NodeId) -> list[int]:
    """Spliced composed hop count per beacon reachable by both, no dedup.

    One entry per stored beacon route, mirroring table granularity; used
    by the hop-count study so averages stay comparable across beacon
    counts.
    """
    out = []
    for b in sorted(set(state.epoch.beacons)):
        hops = _composed_hops(state, customer, merchant, b)
        if hops is not None:
            out.append(len(hops) - 1)
    return out


def select_disjoint(routes: list[Route], fattest_first: bool = False,
                    graph: ChannelGraph | None = None) -> list[Route]:
    """Greedy channel-disjoint subset, preserving list order.

    Channel-disjoint paths let the split solver treat per-path deposits
    independently: no two shares compete for the same channel.  With
    ``fattest_first`` the candidates are re-ranked by descending
    bottleneck before the greedy pass (used as a retry strategy).
    """
    ordered = routes
    if fattest_first:
        if graph is None:
            raise ValueError("fattest_first needs the graph for balances")

        def bottleneck(route: Route) -> int:
            return min(graph.channels[k].balance_of(u)
                       for u, k in zip(route.hops, route.channels))

        ordered = sorted(routes, key=lambda r: (-bottleneck(r), r.length, r.hops))
    used: set[ChannelKey] = set()
    picked = []
    for route in ordered:
        if any(k in used for k in route.channels):
            continue
        used.update(route.channels)
        picked.append(route)
    return picked


# ---------- reactive part ----------

def reactive_probe(graph: ChannelGraph, route: Route) -> PathProbe:
    """Read current per-hop deposits and fee policies along a route."""
    send, recv, pols = [], [], []
    for sender, key in zip(route.hops, route.channels):
        ch = graph.channels.get(key)
        if ch is None:
            raise StaleRoute(f"channel {key} was closed")
        receiver = ch.other(sender)
        send.append(ch.balance_of(sender))
        recv.append(ch.balance_of(receiver))
        pols.append(graph.policy(receiver))
    return PathProbe(route=route, send_deposits=send, recv_deposits=recv,
                     fee_policies=pols)


# ---------- baseline single-path router ----------

def ln_route(graph: ChannelGraph, customer: NodeId, merchant: NodeId,
             amount: int) -> Route:
    """Cheapest feasible single path for ``amount``.

    Dijkstra from the merchant: ``arrive[v]`` is what must reach v so
    the merchant nets the amount; forwarding over (u, v) requires u's
    side of the channel to cover ``arrive[v]``.  Endpoints charge
    nothing.  Ties break on hop count, then node id.
    """
    if amount <= 0:
        raise ValueError("amount must be positive")
    if customer == merchant:
        raise ValueError("customer and merchant must differ")
    if customer not in graph.policies or merchant not in graph.policies:
        raise NoRoute("endpoint missing from graph")

    arrive: dict[NodeId, tuple[int, int]] = {merchant: (amount, 0)}
    succ: dict[NodeId, NodeId] = {}
    heap: list[tuple[int, int, NodeId]] = [(amount, 0, merchant)]
    settled: set[NodeId] = set()
    while heap:
        need, hops, v = heapq.heappop(heap)
        if v in settled:
            continue
        settled.add(v)
        if v == customer:
            break
        # cost for an upstream node u to hand `need` to v
        fee_v = 0 if v == merchant else graph.policy(v).fee(need)
        need_up = need + fee_v
        for u in graph.neighbors(v):
            if u in settled:
                continue
            ch = graph.channel_between(u, v)
            if ch.balance_of(u) < need_up:
                continue
            cand = (need_up, hops + 1)
            if u not in arrive or cand < arrive[u]:
                arrive[u] = cand
                succ[u] = v
                heapq.heappush(heap, (need_up, hops + 1, u))
    if customer not in settled:
        raise NoRoute(f"no feasible path {customer}->{merchant} for {amount}")
    hops_list = [customer]
    while hops_list[-1] != merchant:
        hops_list.append(succ[hops_list[-1]])
    return make_route(graph, hops_list)
