import pytest

from rapido_net.config import SimConfig
from rapido_net.dhtlc import Ledger, ProtocolEngine
from rapido_net.experiments import htlc_fixture, shares_fixture
from rapido_net.routing import PathProbe, Route
from rapido_net.topology import ChannelGraph, FeePolicy

BTC = 100_000_000


def make_probe(deposits, policies=None, recv=None):
    """Standalone path probe over synthetic hop ids."""
    n = len(deposits)
    hops = tuple(f"h{i}" for i in range(n + 1))
    channels = tuple((min(a, b), max(a, b)) for a, b in zip(hops, hops[1:]))
    if policies is None:
        policies = [FeePolicy(0, 0)] * n
    return PathProbe(Route(hops, channels), list(deposits),
                     list(recv if recv is not None else deposits), list(policies))


def line_graph(*balances):
    """Chain n0-n1-...; balances[i] = left side of channel i, right side equal."""
    g = ChannelGraph()
    count = len(balances) + 1
    for i in range(count):
        g.add_node(f"n{i}")
    for i, bal in enumerate(balances):
        g.add_channel(f"n{i}", f"n{i+1}", 2 * bal, balance_a=bal)
    return g


@pytest.fixture
def cfg():
    return SimConfig()


@pytest.fixture
def shares_setup(cfg):
    graph, ledger = shares_fixture(cfg)
    return graph, ledger, ProtocolEngine(graph, ledger, cfg, seed=7)


@pytest.fixture
def htlc_setup(cfg):
    graph, ledger = htlc_fixture(cfg)
    return graph, ledger, ProtocolEngine(graph, ledger, cfg, seed=7)


def wealth(graph, node):
    return sum(ch.balance_of(node) for ch in graph.channels.values()
               if node in (ch.endpoint_a, ch.endpoint_b))
