"""Kinetic Monte Carlo: continuous-time jump process from a rate table.

Residence in state i is exponential with parameter equal to the total
outflow, and the next state is chosen with probability proportional to
its rate, independently of the residence time.  The two draws come from
two decorrelated streams so the independence structure is built in
literally.  Rate tables are filled in either from closed-form
Eyring-Kramers values or from empirical estimates.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import WellexitError
from .kramers import rate as _ek_rate
from .rngstreams import TAG_KMC_STATE, TAG_KMC_TIME, make_stream


class AbsorbingState(WellexitError):
    pass


@dataclasses.dataclass(frozen=True)
class RateTable:
    states: tuple
    rates: dict                  # (i, j) -> k_ij  for i != j, k_ij >= 0
    provenance: dict             # (i, j) -> "theory" | "empirical"

    def __post_init__(self):
        for (i, j), k in self.rates.items():
            if i == j:
                raise ValueError(f"self-rate not allowed: {(i, j)}")
            if i not in self.states or j not in self.states:
                raise ValueError(f"rate {(i, j)} references unknown states")
            if k < 0:
                raise ValueError(f"negative rate {(i, j)} -> {k}")

    def neighbors(self, i):
        pairs = [(j, k) for (a, j), k in self.rates.items() if a == i and k > 0]
        pairs.sort(key=lambda t: self.states.index(t[0]))
        return pairs

    def outflow(self, i):
        return float(sum(k for (a, _), k in self.rates.items() if a == i))


@dataclasses.dataclass(frozen=True)
class KmcTrajectory:
    times: np.ndarray            # jump times T_0 < T_1 < ...
    states: np.ndarray           # visited states Y_0, Y_1, ... (len = times + 1)
    final_time: float

    def state_at(self, t):
        """Right-continuous step evaluation of Z_t."""
        idx = int(np.searchsorted(self.times, t, side="right"))
        return self.states[idx]


def residence_time(table, i, rng):
    """Exponential residence time via inverse CDF on the time stream."""
    total = table.outflow(i)
    if total <= 0:
        raise AbsorbingState(f"state {i!r} has zero outflow")
    u = rng.random()
    return -np.log1p(-u) / total


def next_state(table, i, rng):
    """Next visited state, rate-proportional, from the state stream."""
    pairs = table.neighbors(i)
    if not pairs:
        raise AbsorbingState(f"state {i!r} has zero outflow")
    ks = np.array([k for _, k in pairs])
    cum = np.cumsum(ks)
    u = rng.random() * cum[-1]
    return pairs[int(np.searchsorted(cum, u, side="right"))][0]


def run(table, start, t_end, seed=0, replica=0):
    """Jump trajectory on [0, t_end] starting from ``start``.

    The residence-time and next-state draws for jump n are the n-th
    values of two independent streams keyed by (seed, replica).
    """
    if start not in table.states:
        raise ValueError(f"unknown start state {start!r}")
    t_rng = make_stream(seed, TAG_KMC_TIME, minor=replica)
    s_rng = make_stream(seed, TAG_KMC_STATE, minor=replica)
    times = []
    states = [start]
    t = 0.0
    current = start
    while t < t_end:
        if table.outflow(current) <= 0:
            break
        dt = residence_time(table, current, t_rng)
        nxt = next_state(table, current, s_rng)
        t += dt
        if t >= t_end:
            break
        times.append(t)
        states.append(nxt)
        current = nxt
    return KmcTrajectory(times=np.asarray(times), states=np.asarray(states, dtype=object),
                         final_time=float(t_end))


def sample_jump(table, i, seed=0, n=1):
    """n independent (residence, next-state) pairs out of state i."""
    t_rng = make_stream(seed, TAG_KMC_TIME)
    s_rng = make_stream(seed, TAG_KMC_STATE)
    taus = np.array([residence_time(table, i, t_rng) for _ in range(n)])
    nxt = np.array([next_state(table, i, s_rng) for _ in range(n)], dtype=object)
    return taus, nxt


def table_from_landscape(ctx, neighbor_labels=None):
    """Rate table for the well state 0 with Eyring-Kramers outflow rates.

    Boundary minimum i feeds the neighbor state labeled
    ``neighbor_labels[i-1]`` (default 1..n); neighbor states are
    absorbing unless the caller supplies return rates afterwards.
    """
    n = ctx.inventory.n
    if neighbor_labels is None:
        neighbor_labels = tuple(range(1, n + 1))
    if len(neighbor_labels) != n:
        raise ValueError(f"need {n} neighbor labels, got {len(neighbor_labels)}")
    states = (0,) + tuple(neighbor_labels)
    rates = {}
    provenance = {}
    for i, lbl in enumerate(neighbor_labels, start=1):
        rates[(0, lbl)] = _ek_rate(ctx, i)
        provenance[(0, lbl)] = "theory"
    return RateTable(states=states, rates=rates, provenance=provenance)
