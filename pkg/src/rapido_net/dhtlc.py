"""Protocol engine: simulated chain ledger, channel funding lifecycle,
hashlocked single-path payments, and the multi-path variant with cash
collateral and punishment for pre-contract aborts.

Off-chain settlement is engine-driven: once the destination reveals a
path's preimage, every upstream contract on that path is redeemed in
turn, so a path always terminates uniformly (all withdrawn or, after
expiry, all refunded).  A node "withholding" the preimage therefore
stalls its whole path into the refund branch rather than leaving a
half-settled chain behind.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from enum import Enum

from .config import SimConfig, derive_seed
from .routing import PathProbe, Route, reactive_probe
from .topology import Channel, ChannelGraph, ChannelKey, InsufficientBalance, NodeId
from .vdp import VdpSolution, hop_amounts


class InsufficientOnChainFunds(Exception):
    pass


class ChannelBusy(Exception):
    """Channel still carries open contracts."""


class RouteInfeasible(Exception):
    """A hop cannot fund the value plus downstream fees."""


class OutOfSequence(Exception):
    """Contract chained before its predecessor exists and is open."""


class TimelockNotDecreasing(Exception):
    pass


class ContractMissing(Exception):
    """Collateral reclaimed before the guarded contract exists."""


class AlreadyTerminal(Exception):
    pass


class BadPreimage(Exception):
    pass


class Expired(Exception):
    pass


class NotYetExpired(Exception):
    pass


class NotAborted(Exception):
    """Punishment attempted against a node that did set up its contract."""


# ---------- primitives ----------

@dataclass(frozen=True)
class HashLock:
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != 32:
            raise ValueError("digest must be 32 bytes")

    def matches(self, preimage: bytes) -> bool:
        return hashlib.sha256(preimage).digest() == self.digest

    @staticmethod
    def from_preimage(preimage: bytes) -> "HashLock":
        return HashLock(hashlib.sha256(preimage).digest())


@dataclass(frozen=True)
class TimeLock:
    expiry: int


class ContractState(Enum):
    OPEN = "open"
    WITHDRAWN = "withdrawn"
    REFUNDED = "refunded"


@dataclass
class Contract:
    contract_id: str
    sender: NodeId
    receiver: NodeId
    channel: ChannelKey
    value: int
    fee: int  # fees still owed downstream; locked together with the value
    hashlock: HashLock
    timelock: TimeLock
    state: ContractState = ContractState.OPEN
    tag: tuple | None = None  # (payment id, path index, hop index)


class CashState(Enum):
    LOCKED = "locked"
    RETURNED = "returned"
    FORFEITED = "forfeited"


@dataclass
class CashLock:
    lock_id: int
    node: NodeId
    amount: int
    payment_id: int
    path_index: int
    position: int  # hop index of the node along its path
    state: CashState = CashState.LOCKED
    contract_created: bool = False


@dataclass
class LedgerEvent:
    time: int
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps({"time": self.time, "kind": self.kind, **self.payload},
                          sort_keys=True)


@dataclass
class Ledger:
    """Simulated on-chain state: balances, an append-only event log, a clock."""

    balances: dict[NodeId, int] = field(default_factory=dict)
    fee_sink: int = 0
    clock: int = 0
    events: list[LedgerEvent] = field(default_factory=list)
    cash_locks: list[CashLock] = field(default_factory=list)

    @staticmethod
    def with_nodes(nodes, initial: int) -> "Ledger":
        return Ledger(balances={n: initial for n in nodes})

    def log(self, kind: str, **payload) -> None:
        self.events.append(LedgerEvent(self.clock, kind, payload))

    def advance(self, hours: int) -> None:
        if hours < 0:
            raise ValueError("clock is monotone")
        self.clock += hours

    def total_onchain(self) -> int:
        locked = sum(l.amount for l in self.cash_locks if l.state is CashState.LOCKED)
        return sum(self.balances.values()) + self.fee_sink + locked

    def events_jsonl(self) -> str:
        return "".join(e.to_json() + "\n" for e in self.events)

    def copy(self) -> "Ledger":
        return Ledger(balances=dict(self.balances), fee_sink=self.fee_sink,
                      clock=self.clock, events=list(self.events),
                      cash_locks=[CashLock(**vars(l)) for l in self.cash_locks])


def total_funds(graph: ChannelGraph, ledger: Ledger) -> int:
    """Conserved quantity: on-chain money plus everything inside channels."""
    return ledger.total_onchain() + graph.total_capacity()


# ---------- adversary scripting ----------

@dataclass(frozen=True)
class Adversary:
    """Scripted misbehavior, keyed by node id."""

    refuse_participation: frozenset = frozenset()
    abort_before_contract: frozenset = frozenset()
    withhold_preimage: frozenset = frozenset()
    wrong_preimage: frozenset = frozenset()
    refuse_get_back: frozenset = frozenset()


HONEST = Adversary()


# ---------- payment outcome ----------

@dataclass
class PaymentOutcome:
    system: str
    value: int
    settled: bool
    share_results: list[tuple[int, bool]]  # (share, settled) per attempted path
    total_fee_paid: int
    hops_used: list[int]
    paths: list[tuple[NodeId, ...]]
    share_fees: list[int] = field(default_factory=list)  # fee per attempted path
    punished: list[tuple[int, NodeId]] = field(default_factory=list)
    event_span: tuple[int, int] = (0, 0)
    payment_id: int = 0
    failure: str | None = None


# ---------- the engine ----------

class ProtocolEngine:
    """Single-writer state machine over one graph + ledger pair."""

    def __init__(self, graph: ChannelGraph, ledger: Ledger, cfg: SimConfig,
                 seed: int = 0):
        self.graph = graph
        self.ledger = ledger
        self.cfg = cfg
        self.contracts: dict[str, Contract] = {}
        self._escrow: dict[tuple[ChannelKey, NodeId], int] = {}
        self._rng = random.Random(derive_seed(seed, "preimages"))
        self._contract_seq = 0
        self._payment_seq = 0

    # ----- balances / escrow -----

    def available(self, node: NodeId, key: ChannelKey) -> int:
        ch = self.graph.channels[key]
        return ch.balance_of(node) - self._escrow.get((key, node), 0)

    def open_contracts_on(self, key: ChannelKey) -> list[Contract]:
        return [c for c in self.contracts.values()
                if c.channel == key and c.state is ContractState.OPEN]

    def _lock(self, key: ChannelKey, node: NodeId, amount: int) -> None:
        self._escrow[(key, node)] = self._escrow.get((key, node), 0) + amount

    def _unlock(self, key: ChannelKey, node: NodeId, amount: int) -> None:
        self._escrow[(key, node)] -= amount

    # ----- channel funding lifecycle -----

    def open_channel(self, a: NodeId, b: NodeId, fund_a: int, fund_b: int) -> Channel:
        if fund_a < 0 or fund_b < 0 or fund_a + fund_b <= 0:
            raise ValueError("channel needs positive pooled funding")
        if self.graph.channel_between(a, b) is not None:
            raise ValueError(f"channel ({a}, {b}) already exists")
        fee = self.cfg.ledger_open_fee
        bal = self.ledger.balances
        if bal.get(a, 0) < fund_a + fee:
            raise InsufficientOnChainFunds(f"{a} cannot fund {fund_a} plus fee {fee}")
        if bal.get(b, 0) < fund_b:
            raise InsufficientOnChainFunds(f"{b} cannot fund {fund_b}")
        bal[a] -= fund_a + fee
        bal[b] -= fund_b
        self.ledger.fee_sink += fee
        ch = self.graph.add_channel(a, b, fund_a + fund_b)
        ch.set_balance(a, fund_a)
        ch.set_balance(b, fund_b)
        self.ledger.advance(self.cfg.ledger_confirmation_delay)
        self.ledger.log("open_channel", a=a, b=b, fund_a=fund_a, fund_b=fund_b,
                        fee=fee)
        return ch

    def close_channel(self, channel: Channel | ChannelKey, closer: NodeId | None = None
                      ) -> None:
        key = channel.key if isinstance(channel, Channel) else channel
        ch = self.graph.channels[key]
        if self.open_contracts_on(key):
            raise ChannelBusy(f"channel {key} has open contracts")
        closer = closer or ch.endpoint_a
        fee = self.cfg.ledger_close_fee
        bal = self.ledger.balances
        bal[ch.endpoint_a] = bal.get(ch.endpoint_a, 0) + ch.balance_a
        bal[ch.endpoint_b] = bal.get(ch.endpoint_b, 0) + ch.balance_b
        if bal[closer] < fee:
            raise InsufficientOnChainFunds(f"{closer} cannot pay the close fee")
        bal[closer] -= fee
        self.ledger.fee_sink += fee
        self.graph.remove_channel(key)
        self.ledger.advance(self.cfg.ledger_confirmation_delay)
        self.ledger.log("close_channel", a=ch.endpoint_a, b=ch.endpoint_b,
                        balance_a=ch.balance_a, balance_b=ch.balance_b, fee=fee,
                        closer=closer)

    # ----- cash collateral -----

    def open_punish(self, customer: NodeId, list_node: list[NodeId],
                    list_cash: list[int]) -> bool:
        """Lock collateral from every listed node; all-or-nothing.

        Zero amounts are skipped (nothing at stake).  On any shortfall
        every partial lock rolls back and the call reports failure.
        """
        if len(list_node) != len(list_cash):
            raise ValueError("node and cash lists must align")
        payment_id = self._payment_seq
        created: list[CashLock] = []
        self._last_locks: list[CashLock | None] = []
        for pos, (node, cash) in enumerate(zip(list_node, list_cash)):
            if cash < 0:
                raise ValueError("collateral must be nonnegative")
            if cash == 0:
                self._last_locks.append(None)
                continue
            if self.ledger.balances.get(node, 0) < cash:
                for lock in created:
                    lock.state = CashState.RETURNED
                    self.ledger.balances[lock.node] += lock.amount
                    self.ledger.log("cash_return", node=lock.node, amount=lock.amount,
                                    lock=lock.lock_id, reason="rollback")
                self._last_locks = []
                return False
            lock = CashLock(lock_id=len(self.ledger.cash_locks), node=node,
                            amount=cash, payment_id=payment_id, path_index=-1,
                            position=pos)
            self.ledger.balances[node] -= cash
            self.ledger.cash_locks.append(lock)
            created.append(lock)
            self._last_locks.append(lock)
            self.ledger.log("cash_lock", node=node, amount=cash, lock=lock.lock_id,
                            customer=customer)
        return True

    def get_back(self, node: NodeId, lock: CashLock) -> None:
        if lock.state is not CashState.LOCKED:
            raise AlreadyTerminal(f"cash lock {lock.lock_id} is {lock.state.value}")
        if not lock.contract_created:
            raise ContractMissing(
                f"{node} has not set up its contract for lock {lock.lock_id}")
        if lock.node != node:
            raise ValueError("collateral belongs to a different node")
        lock.state = CashState.RETURNED
        self.ledger.balances[node] += lock.amount
        self.ledger.log("cash_return", node=node, amount=lock.amount,
                        lock=lock.lock_id, reason="contract set up")

    def punish(self, customer: NodeId, node: NodeId, lock: CashLock) -> None:
        """Forfeit an aborting node's collateral to the customer.

        Collateral of nodes later on the same path unlocks: their slots
        can no longer be reached.
        """
        if lock.state is not CashState.LOCKED:
            raise AlreadyTerminal(f"cash lock {lock.lock_id} is {lock.state.value}")
        if lock.contract_created:
            raise NotAborted(f"{node} did set up its contract")
        if lock.node != node:
            raise ValueError("collateral belongs to a different node")
        lock.state = CashState.FORFEITED
        self.ledger.balances[customer] = self.ledger.balances.get(customer, 0) + lock.amount
        self.ledger.log("punish", node=node, amount=lock.amount, lock=lock.lock_id,
                        customer=customer)
        for other in self.ledger.cash_locks:
            if (other.payment_id == lock.payment_id
                    and other.path_index == lock.path_index
                    and other.position > lock.position
                    and other.state is CashState.LOCKED):
                other.state = CashState.RETURNED
                self.ledger.balances[other.node] += other.amount
                self.ledger.log("cash_return", node=other.node, amount=other.amount,
                                lock=other.lock_id, reason="upstream abort")

    # ----- contracts -----

    def new_contract(self, prev_id: str | None, sender: NodeId, receiver: NodeId,
                     value: int, fee: int, hashlock: HashLock,
                     timelock: TimeLock, tag: tuple | None = None) -> str:
        if prev_id is not None:
            prev = self.contracts.get(prev_id)
            if prev is None or prev.state is not ContractState.OPEN:
                raise OutOfSequence(f"predecessor {prev_id} missing or not open")
            if timelock.expiry >= prev.timelock.expiry:
                raise TimelockNotDecreasing(
                    f"{timelock.expiry} must drop below {prev.timelock.expiry}")
        ch = self.graph.channel_between(sender, receiver)
        if ch is None:
            raise ValueError(f"no channel between {sender} and {receiver}")
        if self.available(sender, ch.key) < value + fee:
            raise InsufficientBalance(
                f"{sender} cannot lock {value + fee} in {ch.key}")
        self._contract_seq += 1
        cid = f"c{self._contract_seq:06d}"
        self.contracts[cid] = Contract(cid, sender, receiver, ch.key, value, fee,
                                       hashlock, timelock, tag=tag)
        self._lock(ch.key, sender, value + fee)
        return cid

    def withdraw(self, contract_id: str, preimage: bytes) -> Contract:
        c = self._contract(contract_id)
        if c.state is not ContractState.OPEN:
            raise AlreadyTerminal(f"{contract_id} is {c.state.value}")
        if self.ledger.clock >= c.timelock.expiry:
            raise Expired(f"{contract_id} expired at {c.timelock.expiry}")
        if not c.hashlock.matches(preimage):
            raise BadPreimage(f"preimage does not open {contract_id}")
        c.state = ContractState.WITHDRAWN
        self._unlock(c.channel, c.sender, c.value + c.fee)
        ch = self.graph.channels[c.channel]
        ch.set_balance(c.sender, ch.balance_of(c.sender) - (c.value + c.fee))
        ch.set_balance(c.receiver, ch.balance_of(c.receiver) + (c.value + c.fee))
        return c

    def refund(self, contract_id: str) -> Contract:
        c = self._contract(contract_id)
        if c.state is not ContractState.OPEN:
            raise AlreadyTerminal(f"{contract_id} is {c.state.value}")
        if self.ledger.clock < c.timelock.expiry:
            raise NotYetExpired(f"{contract_id} live until {c.timelock.expiry}")
        c.state = ContractState.REFUNDED
        self._unlock(c.channel, c.sender, c.value + c.fee)
        return c

    def _contract(self, contract_id: str) -> Contract:
        c = self.contracts.get(contract_id)
        if c is None:
            raise KeyError(f"unknown contract {contract_id}")
        return c

    # ----- single-path baseline -----

    def htlc_execute(self, route: Route, amount: int,
                     adversary: Adversary = HONEST) -> PaymentOutcome:
        """Chained hashlocked transfer along one route.

        The destination generates the preimage; contracts build from the
        source with strictly decreasing expiries; revealing the preimage
        settles the chain back to the source.  Any disruption leaves the
        whole chain to refund at expiry.
        """
        if amount <= 0:
            raise ValueError("amount must be positive")
        probe = reactive_probe(self.graph, route)
        amounts = hop_amounts(probe, amount)
        for sender, key, carried in zip(route.hops, route.channels, amounts):
            if self.available(sender, key) < carried:
                raise RouteInfeasible(
                    f"{sender} cannot forward {carried} over {key}")
        ev_start = len(self.ledger.events)
        self._payment_seq += 1
        preimage = self._rng.getrandbits(256).to_bytes(32, "big")
        lock = HashLock.from_preimage(preimage)
        t0 = self.ledger.clock
        delta = self.cfg.dhtlc_hop_delta
        hops = len(route.channels)

        chain: list[str] = []
        prev = None
        disrupted = any(n in adversary.withhold_preimage for n in route.hops[1:])
        for j in range(hops):
            sender, receiver = route.hops[j], route.hops[j + 1]
            if j > 0 and sender in adversary.abort_before_contract:
                disrupted = True
                break
            prev = self.new_contract(prev, sender, receiver, amount,
                                     amounts[j] - amount, lock,
                                     TimeLock(t0 + delta * (hops - j)),
                                     tag=(self._payment_seq, 0, j))
            chain.append(prev)

        settled = False
        if len(chain) == hops and not disrupted:
            for node in route.hops[1:]:
                if node in adversary.wrong_preimage:
                    try:
                        self.withdraw(chain[-1], b"\x00" * 32)
                    except BadPreimage:
                        pass
            for cid in reversed(chain):
                self.withdraw(cid, preimage)
            settled = True
        else:
            self._refund_open(chain)
        fee_paid = amounts[0] - amount if settled else 0
        return PaymentOutcome(
            system="ln", value=amount, settled=settled,
            share_results=[(amount, settled)], total_fee_paid=fee_paid,
            hops_used=[hops], paths=[route.hops],
            share_fees=[amounts[0] - amount],
            event_span=(ev_start, len(self.ledger.events)),
            payment_id=self._payment_seq,
            failure=None if settled else "refunded")

    # ----- multi-path protocol -----

    def execute_payment(self, solution: VdpSolution, probes: list[PathProbe],
                        customer: NodeId, merchant: NodeId,
                        adversary: Adversary = HONEST) -> PaymentOutcome:
        """Distribute the solved shares over their paths.

        Per path: collateral is locked up front for every intermediary,
        contracts chain from the customer with decreasing expiries, each
        intermediary reclaims its collateral the moment its contract
        exists, and the merchant's preimage settles the chain.  A node
        that never sets up its contract is punished: its collateral goes
        to the customer, later nodes on that path unlock, and the path's
        contracts refund at expiry.  Paths succeed or fail independently.
        """
        ev_start = len(self.ledger.events)
        self._payment_seq += 1
        active = solution.active_indices()
        plans = []  # (probe, share, amounts)
        for i in active:
            probe, share = probes[i], solution.shares[i]
            plans.append((probe, share, hop_amounts(probe, share)))

        nodes: list[NodeId] = []
        cashes: list[int] = []
        meta: list[tuple[int, int]] = []  # (path ordinal, hop position)
        for p_idx, (probe, share, amounts) in enumerate(plans):
            hops = probe.route.hops
            for pos in range(1, len(hops) - 1):
                own_fee = amounts[pos - 1] - amounts[pos]
                nodes.append(hops[pos])
                cashes.append(self.cfg.dhtlc_cash_multiplier * own_fee)
                meta.append((p_idx, pos))
        if not self.open_punish(customer, nodes, cashes):
            return PaymentOutcome(
                system="rapido", value=solution_value(solution), settled=False,
                share_results=[(share, False) for _, share, _ in plans],
                total_fee_paid=0, hops_used=[p.route.length for p, _, _ in plans],
                paths=[p.route.hops for p, _, _ in plans],
                share_fees=[amounts[0] - share for _, share, amounts in plans],
                event_span=(ev_start, len(self.ledger.events)),
                payment_id=self._payment_seq,
                failure="collateral")
        locks: dict[tuple[int, int], CashLock | None] = {}
        for (p_idx, pos), lock in zip(meta, self._last_locks):
            locks[(p_idx, pos)] = lock
            if lock is not None:
                lock.path_index = p_idx
                lock.position = pos

        share_results: list[tuple[int, bool]] = []
        punished: list[tuple[int, NodeId]] = []
        open_chains: list[str] = []
        total_fee = 0
        t0 = self.ledger.clock
        delta = self.cfg.dhtlc_hop_delta

        for p_idx, (probe, share, amounts) in enumerate(plans):
            hops = probe.route.hops
            n_hops = probe.route.length
            preimage = self._rng.getrandbits(256).to_bytes(32, "big")
            hashlock = HashLock.from_preimage(preimage)
            # the customer derives the lock and hands the preimage to the
            # merchant over a private side channel
            chain: list[str] = []
            prev = None
            failed = False
            for j in range(n_hops):
                sender = hops[j]
                if j > 0:
                    lock = locks.get((p_idx, j))
                    if sender in adversary.abort_before_contract:
                        if lock is not None:
                            self.punish(customer, sender, lock)
                        punished.append((p_idx, sender))
                        failed = True
                        break
                try:
                    prev = self.new_contract(prev, sender, hops[j + 1], share,
                                             amounts[j] - share, hashlock,
                                             TimeLock(t0 + delta * (n_hops - j)),
                                             tag=(self._payment_seq, p_idx, j))
                except InsufficientBalance:
                    # a committed node that cannot fund its hop is an abort
                    if j > 0:
                        lock = locks.get((p_idx, j))
                        if lock is not None:
                            self.punish(customer, sender, lock)
                        punished.append((p_idx, sender))
                    failed = True
                    break
                chain.append(prev)
                if j > 0:
                    lock = locks.get((p_idx, j))
                    if lock is not None:
                        lock.contract_created = True
                        if sender not in adversary.refuse_get_back:
                            self.get_back(sender, lock)

            if failed:
                open_chains.extend(chain)
                share_results.append((share, False))
                continue
            if any(n in adversary.withhold_preimage for n in hops[1:]):
                open_chains.extend(chain)
                share_results.append((share, False))
                continue
            for node in hops[1:]:
                if node in adversary.wrong_preimage:
                    try:
                        self.withdraw(chain[-1], b"\x00" * 32)
                    except BadPreimage:
                        pass
            for cid in reversed(chain):
                self.withdraw(cid, preimage)
            share_results.append((share, True))
            total_fee += amounts[0] - share

        self._refund_open(open_chains)
        settled = bool(share_results) and all(ok for _, ok in share_results)
        return PaymentOutcome(
            system="rapido", value=solution_value(solution), settled=settled,
            share_results=share_results,
            total_fee_paid=total_fee if any(ok for _, ok in share_results) else 0,
            hops_used=[p.route.length for p, _, _ in plans],
            paths=[p.route.hops for p, _, _ in plans],
            share_fees=[amounts[0] - share for _, share, amounts in plans],
            punished=punished,
            event_span=(ev_start, len(self.ledger.events)),
            payment_id=self._payment_seq,
            failure=None if settled else "partial")

    def _refund_open(self, contract_ids: list[str]) -> None:
        pending = [cid for cid in contract_ids
                   if self.contracts[cid].state is ContractState.OPEN]
        if not pending:
            return
        horizon = max(self.contracts[cid].timelock.expiry for cid in pending)
        if self.ledger.clock < horizon:
            self.ledger.advance(horizon - self.ledger.clock)
        for cid in pending:
            self.refund(cid)


def solution_value(solution: VdpSolution) -> int:
    return sum(solution.shares)
