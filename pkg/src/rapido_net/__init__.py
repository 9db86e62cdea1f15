"""Deterministic payment-channel-network simulator.

Two payment systems over the same channel topology:

* ``ln`` -- single-path payments found by a fee-weighted shortest-path
  search and executed with chained hashlocked transfers.
* ``rapido`` -- beacon-based routing, a congestion-minimizing value
  split across several paths, and a multi-path contract protocol with
  cash collateral against pre-contract aborts.

All money is integer satoshis, all randomness is seeded, and every
experiment is byte-reproducible.
"""

__version__ = "0.1.0"
