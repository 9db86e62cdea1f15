"""Congestion metrics and the value-distributing split.

A payment of P satoshis is split into integer shares across candidate
paths so that the worst per-hop strain (share over the forwarding
node's deposit) is minimized, subject to:

* shares sum to P;
* each share stays strictly below every forwarding deposit on its path,
  and small enough that the share plus accrued hop fees still fits;
* cumulative intermediary fees stay within the payment's fee budget
  (linearized per path: summed base fees plus summed rates on the
  share);
* an optional per-hop congestion threshold (upper bound by default; a
  lower-bound and an off mode are selectable).

The optimum is found exactly: for a fixed congestion level the caps are
integers and a rate-greedy assignment decides feasibility, so bisection
over exact rationals pins the minimal level to the unique feasible
breakpoint share/deposit.  Base fees charge only active paths; with few
candidate paths active subsets are enumerated outright, beyond that a
relaxed solve plus zero-share pruning (with capacity-first fallbacks)
approximates the activation choice.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .config import derive_seed
from .routing import PathProbe, Route
from .topology import FeePolicy, NodeId


class ZeroDeposit(Exception):
    """Congestion against an empty deposit is undefined."""


class EmptySolution(Exception):
    """No active hop to take a congestion maximum over."""


class NoFeasibleSplit(Exception):
    """No integer split satisfies the constraints; re-run routing."""


# ---------- congestion metrics ----------

def channel_congestion(share: int, deposit: int) -> Fraction:
    if deposit <= 0:
        raise ZeroDeposit("deposit must be positive")
    if share < 0:
        raise ValueError("share must be nonnegative")
    return Fraction(share, deposit)


def network_congestion(shares: list[int], paths: list[PathProbe]) -> Fraction:
    """Worst per-hop strain across all active paths."""
    worst: Fraction | None = None
    for share, probe in zip(shares, paths):
        if share <= 0:
            continue
        for deposit in probe.send_deposits:
            mu = channel_congestion(share, deposit)
            if worst is None or mu > worst:
                worst = mu
    if worst is None:
        raise EmptySolution("all shares are zero")
    return worst


# ---------- fees along a path ----------

def hop_amounts(probe: PathProbe, share: int) -> list[int]:
    """Value crossing each hop when the destination nets ``share``.

    Accumulated from the destination back: every intermediary forwards
    what the next hop carries and charges its own fee on top, so the
    first hop carries the share plus all fees.
    """
    count = len(probe.send_deposits)
    amounts = [0] * count
    amt = share
    for j in range(count - 1, -1, -1):
        amounts[j] = amt
        if j > 0:
            amt += probe.fee_policies[j - 1].fee(amt)
    return amounts


def path_fee(probe: PathProbe, share: int) -> int:
    """Total intermediary fees for delivering ``share``; endpoints free."""
    if share < 0:
        raise ValueError("share must be nonnegative")
    if len(probe.send_deposits) <= 1:
        return 0
    return hop_amounts(probe, share)[0] - share


# ---------- per-path bounds ----------

@dataclass(frozen=True)
class PathBound:
    bottleneck: int      # smallest forwarding deposit on the path
    cap: int             # largest share that stays strict and settles
    low: int             # smallest share allowed when the path is active
    base_total: int      # summed intermediary base fees
    rate_total_ppm: int  # summed intermediary fee rates

    def lin_fee(self, share: int) -> Fraction:
        return self.base_total + Fraction(share * self.rate_total_ppm, 1_000_000)


def path_bound(probe: PathProbe, threshold: float | Fraction | None,
               threshold_mode: str) -> PathBound:
    deposits = probe.send_deposits
    if not deposits:
        return PathBound(0, 0, 1, 0, 0)
    b = min(deposits)
    cap = b - 1  # strictly below every forwarding deposit
    low = 1
    if threshold_mode not in ("upper", "lower", "off"):
        raise ValueError(f"unknown threshold mode {threshold_mode!r}")
    if threshold_mode != "off":
        thr = threshold if isinstance(threshold, Fraction) else Fraction(str(threshold))
        if not 0 < thr <= 1:
            raise ValueError("congestion threshold must be in (0, 1]")
        if threshold_mode == "upper":
            cap = min(cap, (thr.numerator * b) // thr.denominator)
        else:
            need = thr * max(deposits)
            low = max(low, -((-need.numerator) // need.denominator))  # ceil
    intermediaries = probe.fee_policies[:-1]
    base_total = sum(p.base_fee for p in intermediaries)
    rate_total = sum(p.fee_rate_ppm for p in intermediaries)

    def settles(z: int) -> bool:
        return all(a <= d for a, d in zip(hop_amounts(probe, z), deposits))

    # shrink the cap until the share plus accrued fees fits every hop
    if cap >= 1 and not settles(cap):
        lo, hi = 0, cap  # settles(lo) may hold, settles(hi) does not
        if not settles(0):
            cap = 0
        else:
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if settles(mid):
                    lo = mid
                else:
                    hi = mid
            cap = lo
    return PathBound(b, max(cap, 0), low, base_total, rate_total)


# ---------- instance / solution ----------

@dataclass
class VdpInstance:
    payment_value: int
    paths: list[PathProbe]
    fee_budget: int | None = None  # None = unrestricted
    congestion_threshold: float = 0.95
    threshold_mode: str = "upper"
    exact_subset_limit: int = 4

    def __post_init__(self):
        if self.payment_value <= 0:
            raise ValueError("payment value must be positive")
        if not self.paths:
            raise ValueError("need at least one candidate path")
        if self.fee_budget is not None and self.fee_budget < 0:
            raise ValueError("fee budget must be nonnegative")


@dataclass
class VdpSolution:
    shares: list[int]  # aligned with instance paths; zero = inactive
    network_congestion: Fraction
    total_fees: int
    active_path_count: int

    def active_indices(self) -> list[int]:
        return [i for i, z in enumerate(self.shares) if z > 0]


# ---------- exact solve for a fixed active set ----------

def _solve_active_set(payment: int, bounds: list[PathBound], idxs: list[int],
                      rho: int | None, allow_zero: bool,
                      ) -> tuple[Fraction, dict[int, int]] | None:
    """Minimize the congestion level over the given (active) path set.

    Returns (level, shares) or None when infeasible.  With
    ``allow_zero`` the lower bounds collapse to 0 and base fees are
    still charged for every listed path (callers prune afterwards).
    """
    lows = [0 if allow_zero else max(1, bounds[i].low) for i in idxs]
    caps = [bounds[i].cap for i in idxs]
    if any(l > c for l, c in zip(lows, caps)):
        return None
    if sum(lows) > payment or sum(caps) < payment:
        return None
    base_total = sum(bounds[i].base_total for i in idxs)
    if rho is not None and base_total > rho:
        return None
    fill_order = sorted(range(len(idxs)),
                        key=lambda k: (bounds[idxs[k]].rate_total_ppm, idxs[k]))

    def assign(mu: Fraction) -> list[int] | None:
        capped = []
        for k, i in enumerate(idxs):
            c = min(caps[k], (mu.numerator * bounds[i].bottleneck) // mu.denominator)
            if c < lows[k]:
                return None
            capped.append(c)
        if sum(capped) < payment:
            return None
        z = list(lows)
        rem = payment - sum(lows)
        for k in fill_order:  # cheapest rates first minimizes the linear fee
            take = min(rem, capped[k] - z[k])
            z[k] += take
            rem -= take
            if rem == 0:
                break
        if rem:
            return None
        if rho is not None:
            fee = base_total + Fraction(
                sum(z[k] * bounds[i].rate_total_ppm for k, i in enumerate(idxs)),
                1_000_000)
            if fee > rho:
                return None
        return z

    max_b = max(bounds[i].bottleneck for i in idxs)
    hi = max(Fraction(caps[k], bounds[i].bottleneck) for k, i in enumerate(idxs))
    best = assign(hi)
    if best is None:
        return None
    lo = Fraction(0)
    if assign(lo) is not None:  # payment of zero shares cannot happen (P > 0)
        return lo, dict(zip(idxs, best))
    # bisect until the interval holds a single share/deposit breakpoint
    steps = 2 * max_b.bit_length() + 4
    for _ in range(steps):
        mid = (lo + hi) / 2
        if assign(mid) is None:
            lo = mid
        else:
            hi = mid
    cands = {Fraction(min((hi.numerator * bounds[i].bottleneck) // hi.denominator,
                          caps[k]), bounds[i].bottleneck)
             for k, i in enumerate(idxs)}
    mu_star = max(c for c in cands if c > lo)
    z_star = assign(mu_star)
    assert z_star is not None, "breakpoint refinement lost feasibility"
    return mu_star, dict(zip(idxs, z_star))


def _lin_fee_total(bounds: list[PathBound], shares: dict[int, int]) -> Fraction:
    total = Fraction(0)
    for i, z in shares.items():
        if z > 0:
            total += bounds[i].lin_fee(z)
    return total


def solve_vdp(instance: VdpInstance) -> VdpSolution:
    """Split the payment across candidate paths at minimal congestion.

    Raises :class:`NoFeasibleSplit` when no integer split fits, which
    tells the caller to pick different routing paths and retry.
    """
    payment = instance.payment_value
    bounds = [path_bound(p, instance.congestion_threshold, instance.threshold_mode)
              for p in instance.paths]
    usable = [i for i, b in enumerate(bounds) if b.cap >= 1]
    if not usable:
        raise NoFeasibleSplit("no path can carry a single satoshi")
    rho = instance.fee_budget
    zero_base = all(bounds[i].base_total == 0 for i in usable)
    subset_sized = len(usable) <= instance.exact_subset_limit
    need_activation = instance.threshold_mode == "lower" or not zero_base

    picked: tuple[Fraction, Fraction, dict[int, int]] | None = None  # (mu, fee, shares)

    def consider(result: tuple[Fraction, dict[int, int]] | None):
        nonlocal picked
        if result is None:
            return
        mu, shares = result
        shares = {i: z for i, z in shares.items() if z > 0}
        if not shares:
            return
        fee = _lin_fee_total(bounds, shares)
        if rho is not None and fee > rho:
            return
        key = (mu, fee, sorted(shares.items()))
        if picked is None or key < (picked[0], picked[1], sorted(picked[2].items())):
            picked = (mu, fee, shares)

    if need_activation and subset_sized:
        for mask in range(1, 1 << len(usable)):
            subset = [usable[k] for k in range(len(usable)) if mask >> k & 1]
            consider(_solve_active_set(payment, bounds, subset, rho, allow_zero=False))
    elif instance.threshold_mode == "lower":
        # too many paths to enumerate: treat every usable path as active
        consider(_solve_active_set(payment, bounds, usable, rho, allow_zero=False))
    else:
        consider(_solve_active_set(payment, bounds, usable, rho, allow_zero=True))
        if picked is None and not zero_base:
            # base fees of never-used paths may break the budget: retry on
            # capacity-first prefixes
            by_cap = sorted(usable, key=lambda i: (-bounds[i].cap, i))
            for size in range(len(by_cap) - 1, 0, -1):
                consider(_solve_active_set(payment, bounds, sorted(by_cap[:size]),
                                           rho, allow_zero=True))
                if picked is not None:
                    break

    if picked is None:
        raise NoFeasibleSplit(
            f"cannot split {payment} within budget {rho} over {len(usable)} paths")
    mu, fee, share_map = picked
    shares = [share_map.get(i, 0) for i in range(len(instance.paths))]
    # integer fee: the exact rational never exceeds an integer budget iff
    # its ceiling does not
    total_fees = -((-fee.numerator) // fee.denominator)
    return VdpSolution(shares=shares,
                       network_congestion=network_congestion(shares, instance.paths),
                       total_fees=total_fees,
                       active_path_count=len(share_map))


# ---------- participation requests ----------

def request_participation(solution: VdpSolution, paths: list[PathProbe], *,
                          agree_prob: float = 1.0, seed: int = 0,
                          always_refuse: frozenset[NodeId] | set[NodeId] = frozenset(),
                          ) -> bool:
    """Ask every intermediary on every active path; true iff all agree.

    Each node's answer is an independent seeded draw, so a repeat query
    with the same seed reproduces the same outcome.
    """
    for i in solution.active_indices():
        for node in paths[i].intermediaries():
            if node in always_refuse:
                return False
            if agree_prob >= 1.0:
                continue
            rng = random.Random(derive_seed(seed, "participate", node))
            if rng.random() >= agree_prob:
                return False
    return True


# ---------- JSON wire format for the CLI ----------

def instance_to_dict(instance: VdpInstance) -> dict:
    return {
        "payment_value": instance.payment_value,
        "fee_budget": instance.fee_budget,
        "congestion_threshold": instance.congestion_threshold,
        "threshold_mode": instance.threshold_mode,
        "paths": [
            {
                "hops": list(p.route.hops),
                "send_deposits": list(p.send_deposits),
                "recv_deposits": list(p.recv_deposits),
                "fee_policies": [
                    {"base_fee": f.base_fee, "fee_rate_ppm": f.fee_rate_ppm}
                    for f in p.fee_policies
                ],
            }
            for p in instance.paths
        ],
    }


def instance_from_dict(data: dict) -> VdpInstance:
    paths = []
    for entry in data["paths"]:
        hops = tuple(str(h) for h in entry["hops"])
        channels = tuple((min(u, v), max(u, v)) for u, v in zip(hops, hops[1:]))
        paths.append(PathProbe(
            route=Route(hops, channels),
            send_deposits=[int(x) for x in entry["send_deposits"]],
            recv_deposits=[int(x) for x in entry["recv_deposits"]],
            fee_policies=[FeePolicy(int(f["base_fee"]), int(f["fee_rate_ppm"]))
                          for f in entry["fee_policies"]],
        ))
    return VdpInstance(
        payment_value=int(data["payment_value"]),
        paths=paths,
        fee_budget=None if data.get("fee_budget") is None else int(data["fee_budget"]),
        congestion_threshold=float(data.get("congestion_threshold", 0.95)),
        threshold_mode=str(data.get("threshold_mode", "upper")),
    )


def solution_to_dict(solution: VdpSolution) -> dict:
    return {
        "shares": list(solution.shares),
        "network_congestion": float(solution.network_congestion),
        "total_fees": solution.total_fees,
        "active_path_count": solution.active_path_count,
    }
