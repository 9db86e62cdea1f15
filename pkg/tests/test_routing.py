import random
from collections import deque

import pytest

from conftest import BTC, line_graph
from rapido_net.beacon import BeaconEpoch, epoch_for
from rapido_net.experiments import shares_fixture
from rapido_net.routing import (NoCandidatePath, NoRoute, StaleRoute,
                                candidate_paths, composed_route_lengths,
                                ln_route, make_route, proactive_update,
                                reactive_probe, select_disjoint,
                                splice_out_cycles)
from rapido_net.topology import ChannelGraph, FeePolicy, assign_deposits, \
    generate_synthetic_graph


def epoch_with(graph, beacons):
    return BeaconEpoch(epoch_index=0, period_length=12, beacons=tuple(beacons),
                       seed=0)


def bfs_distance(graph, a, b):
    if a == b:
        return 0
    seen = {a: 0}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for v in graph.adjacency[u]:
            if v not in seen:
                seen[v] = seen[u] + 1
                if v == b:
                    return seen[v]
                queue.append(v)
    return None


# ---------- proactive tables ----------

def test_adjacent_beacon_route_length_one():
    g = line_graph(5, 5)
    state = proactive_update(g, epoch_with(g, ["n1"]))
    assert state.table("n0").entries["n1"].length == 1


def test_line_graph_route():
    g = line_graph(5, 5)  # n0 - n1 - n2
    state = proactive_update(g, epoch_with(g, ["n2"]))
    route = state.table("n0").entries["n2"]
    assert route.hops == ("n0", "n1", "n2")
    assert route.length == 2


def test_disconnected_node_has_empty_table():
    g = line_graph(5, 5)
    g.add_node("island")
    state = proactive_update(g, epoch_with(g, ["n2"]))
    assert state.table("island").entries == {}


def test_bfs_routes_are_hop_minimal():
    rng = random.Random(4)
    for trial in range(10):
        g = generate_synthetic_graph(40, 90, seed=trial)
        beacons = rng.sample(g.nodes(), 5)
        state = proactive_update(g, epoch_with(g, beacons))
        for node in rng.sample(g.nodes(), 8):
            table = state.table(node)
            for beacon in beacons:
                expected = bfs_distance(g, node, beacon)
                if expected is None:
                    assert beacon not in table.entries
                else:
                    route = table.entries[beacon]
                    assert route.length == expected
                    assert route.hops[0] == node and route.hops[-1] == beacon


def test_bfs_tie_breaks_toward_smaller_next_hop():
    g = ChannelGraph()
    for n in ("a", "m1", "m2", "z"):
        g.add_node(n)
    g.add_channel("a", "m1", 2, balance_a=1)
    g.add_channel("a", "m2", 2, balance_a=1)
    g.add_channel("m1", "z", 2, balance_a=1)
    g.add_channel("m2", "z", 2, balance_a=1)
    state = proactive_update(g, epoch_with(g, ["z"]))
    assert state.table("a").entries["z"].hops == ("a", "m1", "z")


# ---------- candidate composition ----------

def test_splice_out_cycles():
    assert splice_out_cycles(list("abcb" "d")) == ["a", "b", "d"]
    assert splice_out_cycles(["x"]) == ["x"]
    assert splice_out_cycles(["a", "b", "a"]) == ["a"]


def test_candidates_through_shared_beacon():
    g = ChannelGraph()
    for n in ("c", "x", "m"):
        g.add_node(n)
    g.add_channel("c", "x", 2, balance_a=1)
    g.add_channel("m", "x", 2, balance_a=1)
    epoch = epoch_with(g, ["x"])
    state = proactive_update(g, epoch)
    routes = candidate_paths(state, "c", "m", epoch)
    assert [r.hops for r in routes] == [("c", "x", "m")]


def test_composition_deloops_to_direct_path():
    # c and m share a channel; both route to the beacon through each other
    g = ChannelGraph()
    for n in ("c", "m", "x"):
        g.add_node(n)
    g.add_channel("c", "m", 2, balance_a=1)
    g.add_channel("m", "x", 2, balance_a=1)
    epoch = epoch_with(g, ["x"])
    state = proactive_update(g, epoch)
    routes = candidate_paths(state, "c", "m", epoch)
    assert [r.hops for r in routes] == [("c", "m")]


def test_disjoint_components_have_no_candidates():
    g = line_graph(5)
    g.add_node("far")
    g.add_node("faraway")
    g.add_channel("far", "faraway", 2, balance_a=1)
    epoch = epoch_with(g, ["n1"])
    state = proactive_update(g, epoch)
    with pytest.raises(NoCandidatePath):
        candidate_paths(state, "n0", "far", epoch)


def test_candidates_simple_sorted_and_capped():
    g = generate_synthetic_graph(60, 150, seed=2)
    assign_deposits(g)
    epoch = epoch_for(g, 20, 0, seed=3)
    state = proactive_update(g, epoch)
    nodes = g.nodes()
    rng = random.Random(0)
    for _ in range(15):
        a, b = rng.sample(nodes, 2)
        try:
            routes = candidate_paths(state, a, b, epoch, max_candidates=5)
        except NoCandidatePath:
            continue
        assert len(routes) <= 5
        lengths = [r.length for r in routes]
        assert lengths == sorted(lengths)
        for r in routes:
            assert r.hops[0] == a and r.hops[-1] == b
            assert len(set(r.hops)) == len(r.hops)


def test_select_disjoint_never_reuses_channels():
    graph, _ = shares_fixture()
    epoch = epoch_for(graph, 200, 0, seed=0)
    state = proactive_update(graph, epoch)
    routes = candidate_paths(state, "alice", "bob", epoch, max_candidates=None)
    picked = select_disjoint(routes)
    used = [k for r in picked for k in r.channels]
    assert len(used) == len(set(used))
    assert len(picked) == 3  # one route per customer channel


def test_composed_route_lengths_counts_every_beacon():
    g = line_graph(5, 5, 5)
    epoch = epoch_with(g, ["n1", "n2"])
    state = proactive_update(g, epoch)
    lengths = composed_route_lengths(state, "n0", "n3")
    assert len(lengths) == 2
    assert all(l >= 3 for l in lengths)


# ---------- reactive probes ----------

def test_probe_reports_both_directions():
    graph, _ = shares_fixture()
    route = make_route(graph, ["alice", "dani"])
    probe = reactive_probe(graph, route)
    assert probe.send_deposits == [2 * BTC + 1]
    assert probe.recv_deposits == [3 * BTC]


def test_probe_zero_length_route():
    graph, _ = shares_fixture()
    probe = reactive_probe(graph, make_route(graph, ["alice"]))
    assert probe.send_deposits == [] and probe.fee_policies == []


def test_probe_closed_channel_is_stale():
    g = line_graph(5, 5)
    route = make_route(g, ["n0", "n1", "n2"])
    g.remove_channel(("n0", "n1"))
    with pytest.raises(StaleRoute):
        reactive_probe(g, route)


# ---------- baseline router ----------

def test_direct_channel_single_hop():
    g = line_graph(10)
    route = ln_route(g, "n0", "n1", 5)
    assert route.hops == ("n0", "n1")


def test_shares_fixture_has_no_single_path():
    graph, _ = shares_fixture()
    with pytest.raises(NoRoute):
        ln_route(graph, "alice", "bob", 6 * BTC)


def test_cheaper_parallel_path_wins():
    g = ChannelGraph()
    g.add_node("s")
    g.add_node("t")
    g.add_node("cheap", FeePolicy(base_fee=1))
    g.add_node("dear", FeePolicy(base_fee=50))
    for mid in ("cheap", "dear"):
        g.add_channel("s", mid, 2000, balance_a=1000)
        g.add_channel(mid, "t", 2000, balance_a=1000)
    route = ln_route(g, "s", "t", 100)
    # enumerate both two-hop options: fees are 1 vs 50
    assert "cheap" in route.hops


def test_route_respects_balances_with_fees():
    g = ChannelGraph()
    g.add_node("s")
    g.add_node("mid", FeePolicy(base_fee=10))
    g.add_node("t")
    g.add_channel("s", "mid", 200, balance_a=109)  # needs 110 to forward 100
    g.add_channel("mid", "t", 200, balance_a=150)
    with pytest.raises(NoRoute):
        ln_route(g, "s", "t", 100)
    g.channels[("mid", "s")].set_balance("s", 110) if ("mid", "s") in g.channels \
        else g.channels[("s", "mid")].set_balance("s", 110)
    route = ln_route(g, "s", "t", 100)
    assert route.hops == ("s", "mid", "t")


def test_route_hop_feasibility_invariant():
    g = generate_synthetic_graph(80, 220, seed=5)
    assign_deposits(g)
    nodes = g.nodes()
    rng = random.Random(1)
    checked = 0
    for _ in range(40):
        a, b = rng.sample(nodes, 2)
        try:
            route = ln_route(g, a, b, 5000)
        except NoRoute:
            continue
        probe = reactive_probe(g, route)
        from rapido_net.vdp import hop_amounts
        for carried, have in zip(hop_amounts(probe, 5000), probe.send_deposits):
            assert have >= carried
        checked += 1
    assert checked > 10
