"""Skewness and outcome metrics shared by both systems' experiment runs."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from fractions import Fraction

from .dhtlc import PaymentOutcome
from .topology import ChannelKey, NodeId

SERIOUS_SKEW_THRESHOLD = Fraction(1, 100)


class PaymentExceedsOutbound(Exception):
    """A node cannot forward more than it holds on the outgoing side."""


class EmptySampleSet(Exception):
    pass


class EmptyOutcomeSet(Exception):
    pass


@dataclass(frozen=True)
class SkewnessSample:
    node: NodeId
    direction: tuple[ChannelKey, ChannelKey]  # (incoming, outgoing) channel
    value: Fraction


def node_skewness(z_in: int, z_out: int, payment: int, fee: int) -> Fraction:
    """Outbound-over-inbound deposit ratio right after forwarding a payment.

    With a zero payment and fee this is just the current ratio; a ratio
    near zero means the direction is drained.
    """
    if payment > z_out:
        raise PaymentExceedsOutbound(f"cannot forward {payment} with {z_out} outbound")
    denominator = z_in + payment + fee
    if denominator <= 0:
        raise ValueError("inbound side plus payment and fee must be positive")
    return Fraction(z_out - payment, denominator)


def skewed_ratio(samples: list[SkewnessSample],
                 threshold: Fraction = SERIOUS_SKEW_THRESHOLD) -> Fraction:
    """Share of involved nodes whose most-skewed direction falls below threshold.

    Each node counts once, by the minimum over its sampled directions.
    """
    if not samples:
        raise EmptySampleSet("no skewness samples")
    per_node: dict[NodeId, Fraction] = {}
    for s in samples:
        cur = per_node.get(s.node)
        if cur is None or s.value < cur:
            per_node[s.node] = s.value
    skewed = sum(1 for v in per_node.values() if v < threshold)
    return Fraction(skewed, len(per_node))


def success_rate(outcomes: list[PaymentOutcome]) -> Fraction:
    """Fully-settled payments over attempts; partial settlements fail."""
    if not outcomes:
        raise EmptyOutcomeSet("no payment outcomes")
    return Fraction(sum(1 for o in outcomes if o.settled), len(outcomes))


def fee_stats(outcomes: list[PaymentOutcome]) -> tuple[float, float]:
    """Mean and population stddev of fees over fully-settled payments."""
    fees = [o.total_fee_paid for o in outcomes if o.settled]
    if not fees:
        return 0.0, 0.0
    return float(statistics.fmean(fees)), float(statistics.pstdev(fees))


@dataclass
class MetricRow:
    scenario: str
    system: str
    payment_value: int
    fee_restriction: int | None
    success_rate: float
    avg_fee: float
    fee_stddev: float
    skewed_ratio: float
    seed: int


CSV_HEADER = ("scenario,system,payment_value,fee_restriction,"
              "success_rate,avg_fee,fee_stddev,skewed_ratio,seed")


def row_to_csv(row: MetricRow) -> str:
    restriction = "" if row.fee_restriction is None else str(row.fee_restriction)
    return ",".join([
        row.scenario,
        row.system,
        str(row.payment_value),
        restriction,
        f"{row.success_rate:.6f}",
        f"{row.avg_fee:.6f}",
        f"{row.fee_stddev:.6f}",
        f"{row.skewed_ratio:.6f}",
        str(row.seed),
    ])
