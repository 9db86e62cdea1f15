import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BTC, make_probe
from rapido_net.experiments import shares_fixture
from rapido_net.routing import make_route, reactive_probe
from rapido_net.topology import FeePolicy
from rapido_net.vdp import (EmptySolution, NoFeasibleSplit, VdpInstance,
                            ZeroDeposit, channel_congestion, hop_amounts,
                            network_congestion, path_bound, path_fee,
                            request_participation, solve_vdp)


# ---------- congestion metrics ----------

def test_channel_congestion_values():
    assert channel_congestion(1, 2) == Fraction(1, 2)
    assert channel_congestion(0, 7) == 0
    assert channel_congestion(5, 5) == 1


def test_channel_congestion_zero_deposit():
    with pytest.raises(ZeroDeposit):
        channel_congestion(1, 0)


def test_network_congestion_single_path():
    probe = make_probe([4, 8])
    assert network_congestion([2], [probe]) == Fraction(1, 2)


def test_network_congestion_across_paths():
    probes = [make_probe([4]), make_probe([6])]
    assert network_congestion([2, 3], probes) == Fraction(1, 2)


def test_network_congestion_empty():
    with pytest.raises(EmptySolution):
        network_congestion([0, 0], [make_probe([4]), make_probe([6])])


# ---------- path fees ----------

def test_direct_path_charges_nothing():
    assert path_fee(make_probe([100]), 40) == 0


def test_single_intermediary_fee():
    probe = make_probe([2 * BTC, 2 * BTC],
                       policies=[FeePolicy(base_fee=BTC // 10), FeePolicy()])
    share = BTC
    assert path_fee(probe, share) == BTC // 10
    assert hop_amounts(probe, share) == [share + BTC // 10, share]


def test_two_intermediaries_base_fees_add():
    probe = make_probe([5000, 5000, 5000],
                       policies=[FeePolicy(base_fee=10), FeePolicy(base_fee=10),
                                 FeePolicy()])
    assert path_fee(probe, 1000) == 20


# ---------- solver examples ----------

def test_solver_balances_two_paths():
    inst = VdpInstance(5, [make_probe([4]), make_probe([6])],
                       threshold_mode="off")
    sol = solve_vdp(inst)
    # brute force over all splits of 5 confirms (2, 3) minimizes max(x/4, y/6)
    best = min(((max(Fraction(z, 4), Fraction(5 - z, 6)), z)
                for z in range(4 + 1) if 5 - z < 6), key=lambda t: t[0])
    assert sol.shares == [best[1], 5 - best[1]] == [2, 3]
    assert sol.network_congestion == Fraction(1, 2)


def test_shares_fixture_split_covers_payment():
    graph, _ = shares_fixture()
    probes = [reactive_probe(graph, make_route(graph, hops)) for hops in
              (["alice", "dani", "bob"], ["alice", "carol", "bob"],
               ["alice", "eva", "frank", "bob"])]
    # the canonical hand split (1, 2, 3) BTC respects every strict bound
    for share, probe in zip((BTC, 2 * BTC, 3 * BTC), probes):
        assert all(share < d for d in probe.send_deposits)
    sol = solve_vdp(VdpInstance(6 * BTC, probes, threshold_mode="off"))
    assert sum(sol.shares) == 6 * BTC
    assert sol.active_path_count == 3
    assert sol.network_congestion < 1


def test_single_path_cannot_exceed_bottleneck():
    with pytest.raises(NoFeasibleSplit):
        solve_vdp(VdpInstance(10, [make_probe([5])], threshold_mode="off"))


def test_fee_budget_rules_out_expensive_path():
    cheap = make_probe([50, 50], policies=[FeePolicy(base_fee=1), FeePolicy()])
    dear = make_probe([50, 50], policies=[FeePolicy(base_fee=100), FeePolicy()])
    sol = solve_vdp(VdpInstance(30, [dear, cheap], fee_budget=10,
                                threshold_mode="off"))
    assert sol.shares[0] == 0 and sol.shares[1] == 30
    assert sol.total_fees <= 10


def test_threshold_upper_caps_share():
    inst = VdpInstance(95, [make_probe([100]), make_probe([1000])],
                       congestion_threshold=0.5, threshold_mode="upper")
    sol = solve_vdp(inst)
    assert sol.shares[0] <= 50
    assert max(channel_congestion(s, p.send_deposits[0])
               for s, p in zip(sol.shares, inst.paths) if s) <= Fraction(1, 2)


def test_threshold_lower_mode_forces_strain():
    inst = VdpInstance(10, [make_probe([100]), make_probe([100])],
                       congestion_threshold=0.08, threshold_mode="lower")
    sol = solve_vdp(inst)
    for share in sol.shares:
        assert share == 0 or share >= 8


# ---------- participation requests ----------

def test_participation_all_honest():
    probes = [make_probe([10, 10])]
    sol = solve_vdp(VdpInstance(5, probes, threshold_mode="off"))
    assert request_participation(sol, probes) is True


def test_participation_refuser_blocks():
    probes = [make_probe([10, 10])]
    sol = solve_vdp(VdpInstance(5, probes, threshold_mode="off"))
    refuser = probes[0].intermediaries()[0]
    assert request_participation(sol, probes,
                                 always_refuse={refuser}) is False


def test_participation_reproducible():
    probes = [make_probe([10] * 6)]  # five intermediaries
    sol = solve_vdp(VdpInstance(5, probes, threshold_mode="off"))
    first = request_participation(sol, probes, agree_prob=0.9, seed=123)
    second = request_participation(sol, probes, agree_prob=0.9, seed=123)
    assert first == second


# ---------- brute-force oracle ----------

def oracle_optimum(payment, probes, fee_budget, threshold, mode):
    """Exhaustive search over integer splits; independent of the solver."""
    bounds = [path_bound(p, threshold, mode) for p in probes]
    best = None
    ranges = [range(payment + 1) for _ in probes[:-1]]
    for head in product(*ranges):
        used = sum(head)
        if used > payment:
            continue
        parts = list(head) + [payment - used]
        mu = Fraction(0)
        fee = Fraction(0)
        valid = True
        for z, b, probe in zip(parts, bounds, probes):
            if z == 0:
                continue
            if not all(z < d for d in probe.send_deposits):
                valid = False
                break
            if not all(a <= d for a, d in
                       zip(hop_amounts(probe, z), probe.send_deposits)):
                valid = False
                break
            if mode == "upper":
                thr = Fraction(str(threshold))
                if any(Fraction(z, d) > thr for d in probe.send_deposits):
                    valid = False
                    break
            elif mode == "lower":
                thr = Fraction(str(threshold))
                if any(Fraction(z, d) < thr for d in probe.send_deposits):
                    valid = False
                    break
            fee += b.base_total + Fraction(z * b.rate_total_ppm, 1_000_000)
            mu = max(mu, max(Fraction(z, d) for d in probe.send_deposits))
        if not valid or all(z == 0 for z in parts):
            continue
        if fee_budget is not None and fee > fee_budget:
            continue
        key = (mu, fee, parts)
        if best is None or key < best:
            best = key
    return best


def random_instance(rng):
    s = rng.randint(1, 4)
    probes = []
    for _ in range(s):
        hops = rng.randint(1, 3)
        deposits = [rng.randint(1, 60) for _ in range(hops)]
        policies = [FeePolicy(rng.choice([0, 0, 1, 3]),
                              rng.choice([0, 0, 2000, 100_000, 400_000]))
                    for _ in range(hops)]
        probes.append(make_probe(deposits, policies))
    payment = rng.randint(1, 40)
    fee_budget = rng.choice([None, rng.randint(0, 25), rng.randint(0, 6)])
    mode = rng.choice(["off", "upper", "upper", "lower"])
    threshold = {"off": 1.0, "upper": rng.choice([0.5, 0.8, 0.95]),
                 "lower": rng.choice([0.02, 0.1])}[mode]
    return VdpInstance(payment, probes, fee_budget=fee_budget,
                       congestion_threshold=threshold, threshold_mode=mode)


def test_solver_matches_oracle():
    rng = random.Random(2024)
    for _ in range(120):
        inst = random_instance(rng)
        expected = oracle_optimum(inst.payment_value, inst.paths,
                                  inst.fee_budget, inst.congestion_threshold,
                                  inst.threshold_mode)
        try:
            got = solve_vdp(inst).network_congestion
        except NoFeasibleSplit:
            got = None
        assert got == (expected[0] if expected else None), vars(inst)


# ---------- properties ----------

@settings(max_examples=60, deadline=None)
@given(st.data())
def test_solutions_satisfy_constraints(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    inst = random_instance(rng)
    try:
        sol = solve_vdp(inst)
    except NoFeasibleSplit:
        return
    assert sum(sol.shares) == inst.payment_value
    assert sol.total_fees <= (inst.fee_budget if inst.fee_budget is not None
                              else sol.total_fees)
    for share, probe in zip(sol.shares, inst.paths):
        if share == 0:
            continue
        assert all(share < d for d in probe.send_deposits)
        assert all(a <= d for a, d in
                   zip(hop_amounts(probe, share), probe.send_deposits))
    if sol.active_path_count >= 2:
        assert all(s < inst.payment_value for s in sol.shares)


def test_budget_relaxation_never_hurts():
    rng = random.Random(77)
    for _ in range(60):
        inst = random_instance(rng)
        if inst.fee_budget is None:
            continue
        relaxed = VdpInstance(inst.payment_value, inst.paths,
                              fee_budget=inst.fee_budget + rng.randint(1, 50),
                              congestion_threshold=inst.congestion_threshold,
                              threshold_mode=inst.threshold_mode)
        try:
            tight = solve_vdp(inst).network_congestion
        except NoFeasibleSplit:
            continue
        loose = solve_vdp(relaxed).network_congestion
        assert loose <= tight


def test_unrestricted_split_fills_proportionally():
    # disjoint bottlenecks 40 and 60, payment 50: the continuous optimum
    # 50/100 is integral, so the integer split matches it exactly
    inst = VdpInstance(50, [make_probe([40]), make_probe([60])],
                       threshold_mode="off")
    sol = solve_vdp(inst)
    assert sol.network_congestion == Fraction(50, 100)
    assert sol.shares == [20, 30]
