"""Quasi-stationary distribution sampling via a Fleming-Viot particle system.

N walkers follow the overdamped dynamics inside the domain; whenever one
exits it is instantly restarted at the position of a surviving walker, so
the empirical law converges to the law of the process conditioned on
survival.  Convergence is monitored with the Gelman-Rubin potential scale
reduction computed across independent replicas started from overdispersed
(uniform-in-domain) initial conditions.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import WellexitError
from .rngstreams import (TAG_FV_BRANCH, TAG_FV_INIT, TAG_FV_PARTICLE,
                         make_stream)


class AllParticlesExited(WellexitError):
    pass


class ZeroVariance(WellexitError):
    pass


class NoConvergence(WellexitError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclasses.dataclass(frozen=True)
class QsdConfig:
    n_particles: int            # total particle count, split across chains
    n_chains: int = 4
    r_threshold: float = 1.02
    snapshot_stride: int = 10
    max_steps: int = 200_000
    min_snapshots: int = 20

    def __post_init__(self):
        if self.n_chains < 2:
            raise ValueError("Gelman-Rubin needs at least 2 chains")
        if self.n_particles // self.n_chains < 2:
            raise ValueError("need at least 2 particles per chain")


@dataclasses.dataclass(frozen=True)
class GRDiag:
    R: float
    window: int
    observable_id: str
    window_too_short: bool = False


def gelman_rubin(traces, observable_id=""):
    """Potential scale reduction over per-chain scalar traces (chains, snaps).

    R = sqrt(((m-1)/m W + B/m) / W) with W the mean within-chain variance
    and B = m var(chain means).  Identical chains give B = 0 and
    R = sqrt((m-1)/m) < 1, reported with a window-too-short flag.
    """
    traces = np.asarray(traces, dtype=float)
    if traces.ndim != 2 or traces.shape[0] < 2 or traces.shape[1] < 2:
        raise ValueError("need at least 2 chains with at least 2 snapshots")
    c, m = traces.shape
    w = float(np.mean(np.var(traces, axis=1, ddof=1)))
    if w == 0.0:
        raise ZeroVariance("within-chain variance is zero (constant traces)")
    b = m * float(np.var(np.mean(traces, axis=1), ddof=1))
    r = float(np.sqrt(((m - 1) / m * w + b / m) / w))
    return GRDiag(R=r, window=m, observable_id=observable_id,
                  window_too_short=b == 0.0)


def uniform_in_domain(landscape, n, rng, max_tries=10_000):
    """Rejection-sample n points uniformly inside the domain."""
    box = landscape.domain.bounding_box()
    d = landscape.dimension
    out = np.empty((n, d))
    have = 0
    for _ in range(max_tries):
        m = max(64, 2 * (n - have))
        cand = box[0] + (box[1] - box[0]) * rng.random((m, d))
        cand = cand[landscape.domain.contains(cand)]
        take = min(n - have, cand.shape[0])
        out[have:have + take] = cand[:take]
        have += take
        if have == n:
            return out
    raise WellexitError("rejection sampling failed to fill the ensemble")


class FVEnsemble:
    """One Fleming-Viot chain: positions, clock, and its noise streams."""

    def __init__(self, landscape, cfg, chain_index, n_particles, positions=None):
        self.landscape = landscape
        self.cfg = cfg
        self.chain_index = int(chain_index)
        self.gen = make_stream(cfg.seed, TAG_FV_PARTICLE, major=self.chain_index)
        if positions is None:
            init = make_stream(cfg.seed, TAG_FV_INIT, major=self.chain_index)
            positions = uniform_in_domain(landscape, n_particles, init)
        self.positions = np.array(positions, dtype=float, copy=True)
        if self.positions.shape[0] < 2:
            raise ValueError("a Fleming-Viot system needs at least 2 particles")
        if not np.all(landscape.domain.contains(self.positions)):
            raise ValueError("all particles must start strictly inside the domain")
        self.time = 0.0
        self.step_index = 0
        self.branch_count = 0

    @property
    def n_particles(self):
        return self.positions.shape[0]

    def observables(self):
        f_mean = float(np.mean(self.landscape.f(self.positions)))
        coords = np.mean(self.positions, axis=0)
        obs = {"f_mean": f_mean}
        for k in range(coords.size):
            obs[f"coord{k}_mean"] = float(coords[k])
        return obs


def fv_step(ensemble, landscape=None, cfg=None):
    """Advance every particle one step; exited particles branch onto survivors.

    Exiters are processed in index order and resample uniformly among the
    particles that did not exit this step, with already-relocated exiters
    counting as survivors.  Branching choices come from a dedicated stream
    keyed by (chain, step), so the evolution is reproducible regardless of
    how chains are scheduled.
    """
    ens = ensemble
    landscape = landscape or ens.landscape
    cfg = cfg or ens.cfg
    d = landscape.dimension
    xi = ens.gen.standard_normal((ens.n_particles, d))
    prop = landscape.grad(ens.positions)
    prop *= cfg.dt
    np.subtract(ens.positions, prop, out=prop)
    xi *= cfg.noise_scale
    prop += xi
    inside = landscape.domain.contains(prop)
    exited = np.nonzero(~inside)[0]
    if exited.size:
        if exited.size == ens.n_particles:
            raise AllParticlesExited(
                "every particle exited in one step; dt or h is far too large "
                "for this domain")
        bgen = make_stream(cfg.seed, TAG_FV_BRANCH, major=ens.chain_index,
                           minor=ens.step_index)
        pool = np.nonzero(inside)[0].tolist()
        for j in exited:
            k = pool[int(bgen.integers(0, len(pool)))]
            prop[j] = prop[k]
            pool.append(int(j))
        ens.branch_count += int(exited.size)
    ens.positions = prop
    ens.time += cfg.dt
    ens.step_index += 1
    return ens


@dataclasses.dataclass
class QsdResult:
    positions: np.ndarray            # pooled final ensemble (all chains)
    converged: bool
    n_steps: int
    diagnostics: list                # (step, {observable: R}, branch_count)
    branch_count: int
    chains: list                     # final FVEnsemble objects


def sample_qsd(landscape, cfg, qsd_cfg, workers=1):
    """Sample the quasi-stationary distribution with replicated FV systems.

    Runs ``n_chains`` independent chains from uniform-in-domain starts and
    iterates until the Gelman-Rubin R of every configured observable
    (energy mean and coordinate means), computed over the second half of
    the snapshot window, falls below the threshold.  Returns the pooled
    ensemble; raises :class:`NoConvergence` (carrying the partial result)
    if the step budget runs out first.
    """
    n_per = qsd_cfg.n_particles // qsd_cfg.n_chains
    chains = [FVEnsemble(landscape, cfg, c, n_per)
              for c in range(qsd_cfg.n_chains)]
    traces = {k: [[] for _ in chains] for k in chains[0].observables()}
    history = []
    stride = qsd_cfg.snapshot_stride

    def advance(chain):
        for _ in range(stride):
            fv_step(chain)
        return chain

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        step = 0
        converged = False
        while step < qsd_cfg.max_steps and not converged:
            if pool is not None:
                list(pool.map(advance, chains))
            else:
                for chain in chains:
                    advance(chain)
            step += stride
            for c, chain in enumerate(chains):
                for key, val in chain.observables().items():
                    traces[key][c].append(val)
            n_snap = len(traces[next(iter(traces))][0])
            if n_snap < qsd_cfg.min_snapshots:
                continue
            window = n_snap // 2
            rs = {}
            for key, per_chain in traces.items():
                arr = np.asarray(per_chain)[:, -window:]
                try:
                    rs[key] = gelman_rubin(arr, key).R
                except ZeroVariance:
                    rs[key] = float("inf")
            history.append((step, rs, sum(c.branch_count for c in chains)))
            converged = all(r < qsd_cfg.r_threshold for r in rs.values())
    finally:
        if pool is not None:
            pool.shutdown()

    result = QsdResult(
        positions=np.concatenate([c.positions for c in chains]),
        converged=converged, n_steps=step, diagnostics=history,
        branch_count=sum(c.branch_count for c in chains), chains=chains)
    if not converged:
        raise NoConvergence(
            f"Gelman-Rubin did not reach {qsd_cfg.r_threshold} within "
            f"{qsd_cfg.max_steps} steps", result=result)
    return result
