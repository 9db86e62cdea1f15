from collections import Counter

import pytest

from rapido_net.beacon import elect_beacons, epoch_for, partition_topology
from rapido_net.topology import ChannelGraph, generate_synthetic_graph


def node_set(count):
    g = ChannelGraph()
    for i in range(count):
        g.add_node(f"n{i:04d}")
    return g


def test_single_portion_holds_all_nodes():
    g = node_set(17)
    portions = partition_topology(g, 1, seed=0)
    assert len(portions) == 1
    assert sorted(portions[0]) == g.nodes()


def test_portion_sizes_full_scale():
    g = node_set(2681)
    portions = partition_topology(g, 200, seed=42)
    sizes = sorted(len(p) for p in portions)
    assert len(portions) == 200
    assert set(sizes) == {13, 14}
    assert sum(sizes) == 2681
    seen = [n for p in portions for n in p]
    assert len(set(seen)) == 2681


def test_more_portions_than_nodes_clamps():
    g = node_set(4)
    portions = partition_topology(g, 5, seed=1)
    assert len(portions) == 4
    assert all(len(p) == 1 for p in portions)


def test_partition_deterministic_and_seed_sensitive():
    g = node_set(100)
    assert partition_topology(g, 7, seed=3) == partition_topology(g, 7, seed=3)
    assert partition_topology(g, 7, seed=3) != partition_topology(g, 7, seed=4)


def test_single_node_portion_elects_it():
    epoch = elect_beacons([["only"]], epoch_index=0, seed=5)
    assert epoch.beacons == ("only",)


def test_election_deterministic():
    portions = [[f"n{i}" for i in range(10)], [f"m{i}" for i in range(10)]]
    a = elect_beacons(portions, epoch_index=3, seed=11)
    b = elect_beacons(portions, epoch_index=3, seed=11)
    assert a.beacons == b.beacons
    assert len(a.beacons) == 2


def test_election_uniform_over_epochs():
    portion = [f"n{i}" for i in range(10)]
    counts = Counter()
    for epoch_index in range(10_000):
        counts[elect_beacons([portion], epoch_index, seed=2).beacons[0]] += 1
    assert set(counts) == set(portion)  # every node can be elected
    for node in portion:
        assert 0.08 <= counts[node] / 10_000 <= 0.12


def test_rotation_changes_beacons():
    portions = [[f"n{i}" for i in range(13)] for _ in range(4)]
    epochs = [elect_beacons(portions, e, seed=9).beacons for e in range(100)]
    repeats = sum(1 for a, b in zip(epochs, epochs[1:]) if a == b)
    # identical consecutive full sets have probability 13^-4
    assert repeats <= 2


def test_epoch_for_uses_graph_nodes():
    g = generate_synthetic_graph(50, 80, seed=1)
    epoch = epoch_for(g, 8, epoch_index=0, seed=0)
    assert len(epoch.beacons) == 8
    assert set(epoch.beacons) <= set(g.nodes())


def test_invalid_portion_count():
    with pytest.raises(ValueError):
        partition_topology(node_set(3), 0, seed=0)
