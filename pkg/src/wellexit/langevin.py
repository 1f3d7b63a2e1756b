"""Euler-Maruyama simulation of the overdamped dynamics and exit detection.

One step advances x by -grad f(x) dt + sqrt(h dt) xi with standard
Gaussian xi per coordinate.  An exit is declared on the first iterate
outside the domain; the exit point is the segment-boundary intersection
and the exit time interpolates linearly within the step.  No
Brownian-bridge correction is applied, so exit statistics carry a known
O(sqrt(dt)) discretization bias; the acceptance margins account for it.

Samples are partitioned into fixed-size blocks; each block draws from its
own counter-based stream keyed by (master seed, block index).  The block
partition depends only on (n_samples, block_size), never on worker count
or scheduling, so event logs are bit-identical for any parallel layout.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import WellexitError
from .rngstreams import TAG_SAMPLE, TAG_STARTS, make_stream


class StartOutsideDomain(WellexitError):
    pass


@dataclasses.dataclass(frozen=True)
class SimConfig:
    dt: float
    h: float
    seed: int
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.h < 0:
            # h = 0 is the deterministic gradient-descent limit (noise off)
            raise ValueError(f"temperature h must be nonnegative, got {self.h}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")

    @property
    def noise_scale(self):
        return float(np.sqrt(self.h * self.dt))


@dataclasses.dataclass(frozen=True)
class BoundaryWindow:
    """Arclength interval [s_lo, s_hi] on a parametrized boundary (d = 2),
    or an endpoint of an interval domain (d = 1, side in {'left','right'})."""

    label: str
    s_lo: float = np.nan
    s_hi: float = np.nan
    side: str = ""

    def contains_s(self, s, length):
        lo = np.mod(self.s_lo, length)
        hi = np.mod(self.s_hi, length)
        s = np.mod(s, length)
        if hi >= lo:
            return (s >= lo) & (s <= hi)
        return (s >= lo) | (s <= hi)


def saddle_windows_for(landscape, inventory):
    """Default exit windows: for the square-with-caps domain the two flat
    segments (each containing one boundary minimum); for an interval the
    two endpoints.  Labels are 'sigma1', 'sigma2', ... in inventory order."""
    dom = landscape.domain
    wins = []
    if landscape.dimension == 1:
        for k, m in enumerate(inventory.boundary_minima, start=1):
            side = "left" if m.z[0] == dom.z1 else "right"
            wins.append(BoundaryWindow(label=f"sigma{k}", side=side))
        return wins
    if dom.kind == "square-with-caps":
        seg = {0: (0.0, 2.0), 1: (2.0 + np.pi, 4.0 + np.pi)}
        for k, m in enumerate(inventory.boundary_minima, start=1):
            lo, hi = seg[0] if abs(m.z[0] - 1.0) < 1e-9 else seg[1]
            wins.append(BoundaryWindow(label=f"sigma{k}", s_lo=lo, s_hi=hi))
        return wins
    raise ValueError(f"no default windows for domain kind {dom.kind!r}")


def label_exit_points(landscape, points, windows):
    """Window index (position in ``windows``) per exit point, -1 if none."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[0]
    out = np.full(n, -1, dtype=np.int64)
    if not windows:
        return out
    dom = landscape.domain
    if landscape.dimension == 1:
        mid = 0.5 * (dom.z1 + dom.z2)
        side = np.where(points[:, 0] < mid, "left", "right")
        for k, w in enumerate(windows):
            out[(side == w.side) & (out == -1)] = k
        return out
    s = np.atleast_1d(dom.boundary_coordinate(points))
    for k, w in enumerate(windows):
        hit = w.contains_s(s, dom.boundary_length) & (out == -1)
        out[hit] = k
    return out


@dataclasses.dataclass
class EventLog:
    """Column-oriented record of exit events, indexed by sample id."""

    tau: np.ndarray          # exit times (censored entries hold max_steps*dt)
    x_exit: np.ndarray       # (n, d); nan rows for censored events
    window: np.ndarray       # window index, -1 unlabeled
    steps: np.ndarray        # step count at exit
    censored: np.ndarray     # bool
    window_labels: tuple     # label strings, position = window index

    @property
    def n(self):
        return self.tau.size

    def label_of(self, idx):
        return self.window_labels[idx] if idx >= 0 else ""


@dataclasses.dataclass(frozen=True)
class ExitEvent:
    tau: float
    x_exit: np.ndarray
    window_label: str
    steps: int
    censored: bool


def em_step(x, landscape, cfg, rng):
    """One Euler-Maruyama step; rng supplies the Gaussian increments."""
    x = np.asarray(x, dtype=float)
    xi = rng.standard_normal(x.shape)
    return (x - cfg.dt * landscape.grad(x)) + cfg.noise_scale * xi


def _crossing(landscape, prev, prop, iters=60):
    """Vectorized bisection for the boundary crossing on [prev, prop]."""
    lo = np.zeros(prev.shape[0])
    hi = np.ones(prev.shape[0])
    dom = landscape.domain
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        pts = prev + mid[:, None] * (prop - prev)
        inside = dom.contains(pts)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    t = 0.5 * (lo + hi)
    return prev + t[:, None] * (prop - prev), t


def _evolve_block(landscape, cfg, block_index, starts, windows):
    """Run one block of samples to exit (or censoring); fully vectorized.

    All samples of a block start together, so the live set at step t is a
    deterministic function of (seed, block), and one Gaussian draw of
    shape (live, d) per step keeps every trajectory reproducible.
    Boundary crossings are collected during the sweep and resolved by one
    vectorized bisection at the end.
    """
    dom = landscape.domain
    n = starts.shape[0]
    d = landscape.dimension
    tau = np.empty(n)
    x_exit = np.full((n, d), np.nan)
    steps_out = np.zeros(n, dtype=np.int64)
    censored = np.zeros(n, dtype=bool)

    pos = np.array(starts, dtype=float, copy=True)
    slot = np.arange(n)           # original positions of the live samples
    gen = make_stream(cfg.seed, TAG_SAMPLE, minor=int(block_index))
    scale = cfg.noise_scale
    dt = cfg.dt

    exit_slots, exit_prev, exit_prop, exit_steps = [], [], [], []
    t = 0
    while slot.size:
        xi = gen.standard_normal((slot.size, d))
        # in-place evaluation of (pos - dt*grad) + scale*xi
        prop = landscape.grad(pos)
        prop *= dt
        np.subtract(pos, prop, out=prop)
        xi *= scale
        prop += xi
        t += 1
        inside = dom.contains(prop)
        if np.all(inside):
            pos = prop
        else:
            idx = np.nonzero(~inside)[0]
            exit_slots.append(slot[idx])
            exit_prev.append(pos[idx])
            exit_prop.append(prop[idx])
            exit_steps.append(np.full(idx.size, t, dtype=np.int64))
            pos = prop[inside]
            slot = slot[inside]
        if t >= cfg.max_steps and slot.size:
            tau[slot] = t * dt
            steps_out[slot] = t
            censored[slot] = True
            break

    if exit_slots:
        slots = np.concatenate(exit_slots)
        prev = np.concatenate(exit_prev)
        prop = np.concatenate(exit_prop)
        n_steps = np.concatenate(exit_steps)
        cross, frac = _crossing(landscape, prev, prop)
        tau[slots] = (n_steps - 1 + frac) * dt
        x_exit[slots] = cross
        steps_out[slots] = n_steps

    labels = np.full(n, -1, dtype=np.int64)
    ok = ~censored
    if windows and np.any(ok):
        labels[ok] = label_exit_points(landscape, x_exit[ok], windows)
    return tau, x_exit, labels, steps_out, censored


DEFAULT_BLOCK_SIZE = 65_536


def batch_exits(start, landscape, cfg, n_samples, windows=(), workers=1,
                block_size=DEFAULT_BLOCK_SIZE, first_block=0):
    """n independent exit events, reproducible for any worker count.

    ``start`` is either a single point (every sample starts there) or an
    ensemble array; sample i then starts at a row chosen by the dedicated
    start-selection stream.  Samples are partitioned into consecutive
    blocks of ``block_size`` (a configuration constant, not a scheduling
    artifact), each with its own noise stream, so the event log depends
    only on (seed, config) and never on workers.  Returns an
    :class:`EventLog` indexed by sample id.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    start = np.asarray(start, dtype=float)
    d = landscape.dimension
    if start.ndim == 1:
        if not landscape.domain.contains(start):
            raise StartOutsideDomain(f"start {start} is not inside the domain")
        starts_all = np.broadcast_to(start, (n_samples, d))
    else:
        picks = make_stream(cfg.seed, TAG_STARTS).integers(0, start.shape[0],
                                                           size=n_samples)
        starts_all = start[picks]

    blocks = [(first_block + j, slice(k, min(k + block_size, n_samples)))
              for j, k in enumerate(range(0, n_samples, block_size))]

    def run(job):
        b_idx, blk = job
        return _evolve_block(landscape, cfg, b_idx, starts_all[blk], list(windows))

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(job) for job in blocks]

    tau = np.concatenate([r[0] for r in results])
    x_exit = np.concatenate([r[1] for r in results])
    window = np.concatenate([r[2] for r in results])
    steps = np.concatenate([r[3] for r in results])
    censored = np.concatenate([r[4] for r in results])
    return EventLog(tau=tau, x_exit=x_exit, window=window, steps=steps,
                    censored=censored,
                    window_labels=tuple(w.label for w in windows))


def simulate_until_exit(x0, landscape, cfg, stream_index=0, windows=()):
    """Single exit event drawn from the stream of the given block index."""
    x0 = np.asarray(x0, dtype=float)
    if not landscape.domain.contains(x0):
        raise StartOutsideDomain(f"start {x0} is not inside the domain")
    log = batch_exits(x0, landscape, cfg, 1, windows=windows,
                      first_block=stream_index)
    label = log.label_of(int(log.window[0]))
    return ExitEvent(tau=float(log.tau[0]), x_exit=log.x_exit[0],
                     window_label=label, steps=int(log.steps[0]),
                     censored=bool(log.censored[0]))
