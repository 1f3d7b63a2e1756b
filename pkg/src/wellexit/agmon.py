"""Agmon distance: graph upper bounds, closed-form lower bounds, geometry checks.

The Agmon distance is the geodesic distance for the degenerate metric with
line element |grad f| ds in the interior and |grad_T f| ds along the
boundary.  Upper bounds come from Dijkstra shortest paths on a weighted
mesh (graph paths are Lipschitz curves, so their length dominates the
infimum, up to quadrature error); lower bounds come from an annulus
argument (any curve leaving a neighborhood must cross a region where the
metric weight is bounded below) and from the energy inequality
d(x, y) >= |f(x) - f(y)|.

These bounds drive the two geometric hypotheses behind the sharp exit
asymptotics: each boundary minimum must be Agmon-far from the complement
of its basin (``check_hypo1``), and the well depth must exceed the
boundary-minima energy spread (``check_hypo2``).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy import sparse
from scipy.optimize import minimize_scalar
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra
from scipy.spatial import cKDTree

from .errors import WellexitError
from .landscape import basin_arcs, basin_index_of

_BOUNDARY_TOL = 1e-9


class PointOutsideDomain(WellexitError):
    pass


class Disconnected(WellexitError):
    pass


class EmptyAnnulus(WellexitError):
    pass


class AlphaNonPositive(WellexitError):
    pass


class InconclusiveBound(WellexitError):
    pass


# ---------------------------------------------------------------------------
# Mesh
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class AgmonMesh:
    nodes: np.ndarray          # (N, d)
    g_values: np.ndarray       # |grad f| at interior nodes, |grad_T f| at boundary nodes
    boundary_mask: np.ndarray  # (N,) bool
    boundary_s: np.ndarray     # arclength coordinate for boundary nodes (nan elsewhere)
    graph: sparse.csr_matrix   # symmetric nonnegative edge weights
    resolution: float
    stencil: int
    landscape: object
    _tree: cKDTree = dataclasses.field(repr=False, default=None)

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    def nearest_node(self, x):
        d, idx = self._tree.query(np.asarray(x, dtype=float))
        return int(idx), float(d)


def _primitive_offsets(stencil):
    offs = []
    for dx in range(0, stencil + 1):
        for dy in range(-stencil, stencil + 1):
            if dx == 0 and dy <= 0:
                continue
            if math.gcd(dx, abs(dy)) != 1:
                continue
            offs.append((dx, dy))
    return offs


def _simpson_weights(landscape, p, q, length=None):
    """3-point Simpson quadrature of |grad f| along straight segments."""
    mid = 0.5 * (p + q)
    gp = np.linalg.norm(landscape.grad(p), axis=-1)
    gm = np.linalg.norm(landscape.grad(mid), axis=-1)
    gq = np.linalg.norm(landscape.grad(q), axis=-1)
    if length is None:
        length = np.linalg.norm(q - p, axis=-1)
    return length * (gp + 4.0 * gm + gq) / 6.0


_mesh_cache = {}


def build_mesh(landscape, resolution, stencil=3):
    """Weighted mesh for shortest-path upper bounds on the Agmon distance.

    Interior nodes sit on a square lattice (spacing ``resolution``) with
    edges to all primitive lattice directions of Chebyshev radius
    ``stencil``; a chain of boundary nodes carries the cheaper tangential
    weight, and ladder edges stitch the two together.  Edge weights are
    3-point Simpson quadratures of the metric density.

    The default radius-3 stencil keeps the worst-case metric distortion of
    lattice paths below 1.4 percent; the classical 8-neighbor stencil
    distorts by up to 8 percent, too coarse for the 2-percent identity
    checks near the minimum.
    """
    key = (landscape.token, float(resolution), int(stencil))
    if key in _mesh_cache:
        return _mesh_cache[key]
    mesh = (_build_mesh_1d(landscape, resolution) if landscape.dimension == 1
            else _build_mesh_2d(landscape, resolution, stencil))
    _mesh_cache[key] = mesh
    return mesh


def _build_mesh_1d(landscape, resolution):
    dom = landscape.domain
    z1, z2 = dom.z1, dom.z2
    n = max(2, int(np.ceil((z2 - z1) / resolution))) + 1
    xs = np.linspace(z1, z2, n)
    nodes = xs[:, None]
    g = np.abs(landscape.grad(nodes)[:, 0])
    boundary = np.zeros(n, dtype=bool)
    boundary[[0, -1]] = True
    g = np.where(boundary, 0.0, g)  # zero-dimensional boundary: no tangential part
    rows = np.arange(n - 1)
    cols = rows + 1
    w = _simpson_weights(landscape, nodes[rows], nodes[cols])
    graph = sparse.csr_matrix(
        (np.concatenate([w, w]),
         (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n))
    s = np.full(n, np.nan)
    return AgmonMesh(nodes=nodes, g_values=g, boundary_mask=boundary,
                     boundary_s=s, graph=graph, resolution=float(resolution),
                     stencil=1, landscape=landscape, _tree=cKDTree(nodes))


def _boundary_chain_s(domain, resolution):
    L = domain.boundary_length
    n_b = int(2 ** np.ceil(np.log2(max(8.0, L / resolution))))
    s = np.linspace(0.0, L, n_b, endpoint=False)
    knots = np.mod(domain.boundary_knots(), L)
    return np.unique(np.concatenate([s, knots]))


def _build_mesh_2d(landscape, resolution, stencil):
    dom = landscape.domain
    res = float(resolution)
    box = dom.bounding_box()
    i_lo = int(np.floor(box[0, 0] / res)) - 1
    i_hi = int(np.ceil(box[1, 0] / res)) + 1
    j_lo = int(np.floor(box[0, 1] / res)) - 1
    j_hi = int(np.ceil(box[1, 1] / res)) + 1
    ii, jj = np.meshgrid(np.arange(i_lo, i_hi + 1), np.arange(j_lo, j_hi + 1),
                         indexing="ij")
    lattice = np.stack([ii * res, jj * res], axis=-1)
    inside = dom.contains(lattice)
    n_int = int(np.count_nonzero(inside))
    ids = np.full(inside.shape, -1, dtype=np.int64)
    ids[inside] = np.arange(n_int)
    interior_nodes = lattice[inside]

    rows, cols, weights = [], [], []

    def _add_edges(p_idx, q_idx, p, q, length=None):
        w = _simpson_weights(landscape, p, q, length)
        rows.append(p_idx)
        cols.append(q_idx)
        weights.append(w)

    # interior lattice edges
    for dx, dy in _primitive_offsets(stencil):
        a = ids[max(0, -dx):ids.shape[0] - max(0, dx),
                max(0, -dy):ids.shape[1] - max(0, dy)]
        b = ids[max(0, dx):ids.shape[0] - max(0, -dx),
                max(0, dy):ids.shape[1] - max(0, -dy)]
        ok = (a >= 0) & (b >= 0)
        pa, pb = a[ok], b[ok]
        if pa.size == 0:
            continue
        p, q = interior_nodes[pa], interior_nodes[pb]
        # segments must stay inside the (possibly non-convex) domain
        mid_ok = dom.contains(0.5 * (p + q))
        if max(abs(dx), abs(dy)) > 1:
            mid_ok &= dom.contains(0.25 * (3 * p + q)) & dom.contains(0.25 * (p + 3 * q))
        pa, pb, p, q = pa[mid_ok], pb[mid_ok], p[mid_ok], q[mid_ok]
        if pa.size:
            _add_edges(pa, pb, p, q)

    # boundary chain
    s_chain = _boundary_chain_s(dom, res)
    n_b = s_chain.size
    b_nodes = dom.boundary_point(s_chain)
    b_ids = n_int + np.arange(n_b)
    L = dom.boundary_length
    s_next = np.roll(s_chain, -1).copy()
    s_next[-1] += L
    seg_len = s_next - s_chain
    s_mid = 0.5 * (s_chain + s_next)
    g1 = landscape.tangential_gradient_norm(s_chain)
    gm = landscape.tangential_gradient_norm(np.mod(s_mid, L))
    g2 = landscape.tangential_gradient_norm(np.mod(s_next, L))
    w_chain = seg_len * (g1 + 4.0 * gm + g2) / 6.0
    rows.append(b_ids)
    cols.append(np.roll(b_ids, -1))
    weights.append(w_chain)

    # ladder edges from boundary nodes to nearby interior nodes
    if n_int:
        tree_int = cKDTree(interior_nodes)
        pairs = tree_int.query_ball_point(b_nodes, r=2.0 * res)
        lad_b, lad_i = [], []
        for k, near in enumerate(pairs):
            for m in near:
                lad_b.append(k)
                lad_i.append(m)
        if lad_b:
            lad_b = np.asarray(lad_b)
            lad_i = np.asarray(lad_i)
            p, q = b_nodes[lad_b], interior_nodes[lad_i]
            mid_ok = dom.contains(0.5 * (p + q)) | (dom.boundary_distance(0.5 * (p + q)) < _BOUNDARY_TOL)
            lad_b, lad_i, p, q = lad_b[mid_ok], lad_i[mid_ok], p[mid_ok], q[mid_ok]
            if lad_b.size:
                _add_edges(b_ids[lad_b], lad_i, p, q)

    nodes = np.vstack([interior_nodes, b_nodes]) if n_int else b_nodes
    g_vals = np.concatenate([
        np.linalg.norm(landscape.grad(interior_nodes), axis=-1) if n_int else np.empty(0),
        landscape.tangential_gradient_norm(s_chain)])
    boundary_mask = np.zeros(nodes.shape[0], dtype=bool)
    boundary_mask[n_int:] = True
    boundary_s = np.full(nodes.shape[0], np.nan)
    boundary_s[n_int:] = s_chain

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    weights = np.concatenate(weights)
    graph = sparse.csr_matrix(
        (np.concatenate([weights, weights]),
         (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(nodes.shape[0], nodes.shape[0]))
    return AgmonMesh(nodes=nodes, g_values=g_vals, boundary_mask=boundary_mask,
                     boundary_s=boundary_s, graph=graph, resolution=res,
                     stencil=int(stencil), landscape=landscape,
                     _tree=cKDTree(nodes))


# ---------------------------------------------------------------------------
# Path length functional
# ---------------------------------------------------------------------------

def _on_boundary(landscape, pts):
    return landscape.domain.boundary_distance(pts) < _BOUNDARY_TOL


def path_length(path, landscape):
    """Length of a polyline in the Agmon metric (trapezoid per segment).

    Interior segments integrate |grad f|; segments whose endpoints both
    lie on the boundary integrate the tangential norm |grad_T f|.
    """
    pts = np.atleast_2d(np.asarray(path, dtype=float))
    if pts.shape[0] < 2:
        return 0.0
    dom = landscape.domain
    inside = dom.contains(pts)
    on_bd = _on_boundary(landscape, pts)
    if not np.all(inside | on_bd):
        raise PointOutsideDomain("path leaves the closed domain")
    p, q = pts[:-1], pts[1:]
    seg_len = np.linalg.norm(q - p, axis=-1)
    live = seg_len > 0
    mids = 0.5 * (p + q)
    mid_ok = dom.contains(mids) | (dom.boundary_distance(mids) < 1e-7)
    if not np.all(mid_ok[live]):
        raise PointOutsideDomain("path segment crosses outside the domain")

    g_pt = np.linalg.norm(landscape.grad(pts), axis=-1)
    if landscape.dimension == 2 and np.any(on_bd) and dom.parametrized:
        s = dom.boundary_coordinate(pts[on_bd])
        g_tan = landscape.tangential_gradient_norm(np.atleast_1d(s))
    seg_boundary = on_bd[:-1] & on_bd[1:]
    g_seg = np.empty(len(p))
    g_left = g_pt[:-1].copy()
    g_right = g_pt[1:].copy()
    if landscape.dimension == 2 and np.any(seg_boundary) and dom.parametrized:
        tan = np.full(pts.shape[0], np.nan)
        tan[on_bd] = g_tan
        g_left[seg_boundary] = tan[:-1][seg_boundary]
        g_right[seg_boundary] = tan[1:][seg_boundary]
    elif landscape.dimension == 1:
        # endpoints of an interval have no tangential direction
        g_left[seg_boundary] = 0.0
        g_right[seg_boundary] = 0.0
    g_seg = 0.5 * (g_left + g_right)
    return float(np.sum(g_seg * seg_len))


# ---------------------------------------------------------------------------
# Dijkstra upper bound
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class DistanceBound:
    lower: float
    upper: float
    witness_path: np.ndarray
    snap_error: float

    def __post_init__(self):
        if self.lower > self.upper + 1e-10:
            raise WellexitError(
                f"distance bound inversion: lower={self.lower} > upper={self.upper}")


def _snap_cost(landscape, x, node):
    d = np.linalg.norm(np.asarray(x, dtype=float) - node)
    if d == 0.0:
        return 0.0
    gx = np.linalg.norm(landscape.grad(np.asarray(x, dtype=float)))
    gn = np.linalg.norm(landscape.grad(node))
    return 0.5 * (gx + gn) * d


def distance_upper(landscape, x, y, resolution=0.01, mesh=None, stencil=3):
    """Dijkstra upper bound on the Agmon distance between x and y.

    Both points snap to the nearest mesh node; the straight snap segments
    are charged at the local metric density so the reported value is the
    length of an actual polyline from x to y.  Returns a
    :class:`DistanceBound` whose lower field carries the energy bound
    |f(x) - f(y)|.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dom = landscape.domain
    for pt in (x, y):
        if not (dom.contains(pt) or dom.boundary_distance(pt) < _BOUNDARY_TOL):
            raise PointOutsideDomain(f"point {pt} is outside the closed domain")
    if mesh is None:
        mesh = build_mesh(landscape, resolution, stencil)
    src, d_src = mesh.nearest_node(x)
    dst, d_dst = mesh.nearest_node(y)
    lower = abs(float(landscape.f(x)) - float(landscape.f(y)))
    if src == dst:
        upper = _snap_cost(landscape, x, mesh.nodes[src]) + \
            _snap_cost(landscape, y, mesh.nodes[dst])
        witness = np.vstack([x, mesh.nodes[src], y])
        return DistanceBound(lower=min(lower, upper), upper=upper,
                             witness_path=witness, snap_error=d_src + d_dst)
    dist, pred = _csgraph_dijkstra(mesh.graph, indices=src,
                                   return_predecessors=True)
    if not np.isfinite(dist[dst]):
        raise Disconnected(
            f"mesh is disconnected between {x} and {y} at resolution "
            f"{mesh.resolution}; refine the mesh")
    chain = [dst]
    while chain[-1] != src:
        chain.append(int(pred[chain[-1]]))
    chain.reverse()
    upper = float(dist[dst]) + _snap_cost(landscape, x, mesh.nodes[src]) + \
        _snap_cost(landscape, y, mesh.nodes[dst])
    witness = np.vstack([x[None], mesh.nodes[chain], y[None]])
    return DistanceBound(lower=lower, upper=upper, witness_path=witness,
                         snap_error=d_src + d_dst)


def distances_from(landscape, x, targets, resolution=0.01, mesh=None, stencil=3):
    """Upper bounds from one source to many targets with a single Dijkstra."""
    if mesh is None:
        mesh = build_mesh(landscape, resolution, stencil)
    x = np.asarray(x, dtype=float)
    src, _ = mesh.nearest_node(x)
    dist = _csgraph_dijkstra(mesh.graph, indices=src)
    out = []
    c_src = _snap_cost(landscape, x, mesh.nodes[src])
    for t in np.atleast_2d(np.asarray(targets, dtype=float)):
        dst, _ = mesh.nearest_node(t)
        if not np.isfinite(dist[dst]):
            raise Disconnected("mesh is disconnected; refine the mesh")
        out.append(float(dist[dst]) + c_src + _snap_cost(landscape, t, mesh.nodes[dst]))
    return np.asarray(out)


# ---------------------------------------------------------------------------
# Annulus lower bound
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class AnnulusBound:
    bound: float
    alpha: float
    inf_g: float
    argmin: np.ndarray
    n_samples: int


def _boundary_annulus_windows(dom, z, r_inner, r_outer, n_scan=8192):
    """Arclength intervals where the boundary crosses the annulus, with
    window endpoints refined by bisection on the radius."""
    L = dom.boundary_length
    s = np.sort(np.concatenate([np.linspace(0.0, L, n_scan, endpoint=False),
                                np.mod(dom.boundary_knots(), L)]))
    r = np.linalg.norm(dom.boundary_point(s) - z, axis=-1)
    inside = (r >= r_inner) & (r <= r_outer)

    def _refine(lo, hi, target):
        rlo = np.linalg.norm(dom.boundary_point(lo) - z)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            rm = np.linalg.norm(dom.boundary_point(mid) - z)
            if (rlo - target) * (rm - target) <= 0:
                hi = mid
            else:
                lo, rlo = mid, rm
        return 0.5 * (lo + hi)

    windows = []
    idx = np.nonzero(inside != np.roll(inside, 1))[0]
    if inside.all():
        return [(0.0, L)]
    if not inside.any():
        return []
    # walk transitions pairwise: entry then exit
    trans = sorted(idx.tolist())
    events = []
    for k in trans:
        prev = (k - 1) % s.size
        lo, hi = s[prev], s[k] if k > 0 else s[prev] + (s[k] + L - s[prev])
        hi = s[k] if k > 0 else s[0] + L
        r_prev = np.linalg.norm(dom.boundary_point(lo) - z)
        target = r_outer if (r_prev > r_outer) != (r[k] > r_outer) else r_inner
        events.append((_refine(lo, hi, target), inside[k]))
    events.sort()
    entries = [e for e, going_in in events if going_in]
    exits = [e for e, going_in in events if not going_in]
    if not entries:
        return []
    for e in entries:
        later = [x for x in exits if x > e]
        windows.append((e, later[0] if later else exits[0] + L))
    return windows


def lower_bound_annulus(landscape, z, r_inner, r_outer, B=None,
                        n_radial=48, n_angular=2048, n_boundary=512):
    """Certified lower bound on inf_{y in B} d_a(z, y) via an annulus sweep.

    Any curve from z to a point outside the ball of radius ``r_outer``
    crosses the annulus between the two radii, paying at least
    alpha * inf g, with alpha = r_outer - r_inner (Euclidean straight-line
    distance lower-bounds any in-domain geodesic between the two rims).
    B, when given, is validated to be disjoint from the outer
    neighborhood.
    """
    z = np.asarray(z, dtype=float)
    if r_outer <= r_inner:
        raise AlphaNonPositive(f"need r_inner < r_outer, got {r_inner} >= {r_outer}")
    dom = landscape.domain
    if B is not None:
        B = np.atleast_2d(np.asarray(B, dtype=float))
        gap = np.min(np.linalg.norm(B - z, axis=-1))
        if gap <= r_outer:
            raise EmptyAnnulus(
                f"target set intersects the outer neighborhood "
                f"(min distance {gap:.4f} <= r_outer={r_outer})")
    alpha = r_outer - r_inner

    best_g = np.inf
    best_pt = None
    n_samp = 0

    if landscape.dimension == 1:
        xs = np.linspace(z[0] - r_outer, z[0] + r_outer, n_angular)[:, None]
        r = np.abs(xs[:, 0] - z[0])
        keep = (r >= r_inner) & (r <= r_outer) & dom.contains(xs)
        pts = xs[keep]
        if pts.size:
            g = np.abs(landscape.grad(pts)[:, 0])
            k = int(np.argmin(g))
            best_g, best_pt = float(g[k]), pts[k]
            n_samp += pts.shape[0]
    else:
        radii = np.linspace(r_inner, r_outer, n_radial)
        theta = np.linspace(0.0, 2.0 * np.pi, n_angular, endpoint=False)
        rr, tt = np.meshgrid(radii, theta, indexing="ij")
        pts = np.stack([z[0] + rr * np.cos(tt), z[1] + rr * np.sin(tt)], axis=-1)
        pts = pts.reshape(-1, 2)
        pts = pts[dom.contains(pts)]
        if pts.shape[0]:
            g = np.linalg.norm(landscape.grad(pts), axis=-1)
            k = int(np.argmin(g))
            best_g, best_pt = float(g[k]), pts[k]
            n_samp += pts.shape[0]

        if dom.parametrized:
            for lo, hi in _boundary_annulus_windows(dom, z, r_inner, r_outer):
                ss = np.linspace(lo, hi, max(8, n_boundary))
                gt = landscape.tangential_gradient_norm(np.mod(ss, dom.boundary_length))
                k = int(np.argmin(gt))
                # polish inside the window around the discrete minimum
                wlo = ss[max(0, k - 1)]
                whi = ss[min(len(ss) - 1, k + 1)]
                res = minimize_scalar(
                    lambda s: float(landscape.tangential_gradient_norm(
                        np.mod(s, dom.boundary_length))),
                    bounds=(wlo, whi), method="bounded", options={"xatol": 1e-13})
                cand = min(float(gt[k]), float(res.fun))
                if cand < best_g:
                    best_g = cand
                    s_best = res.x if float(res.fun) <= float(gt[k]) else ss[k]
                    best_pt = dom.boundary_point(np.mod(s_best, dom.boundary_length))
                n_samp += ss.size

    if best_pt is None:
        raise EmptyAnnulus("annulus contains no domain points at this sampling")
    return AnnulusBound(bound=alpha * best_g, alpha=alpha, inf_g=best_g,
                        argmin=np.asarray(best_pt), n_samples=n_samp)


# ---------------------------------------------------------------------------
# Hypothesis checks
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Hypo1Entry:
    index: int                # 1-based boundary-minimum index
    threshold: float
    verdict: str              # "pass" | "fail" | "inconclusive"
    certified: bool
    method: str
    value: float              # certified bound (pass) or path estimate
    note: str = ""


@dataclasses.dataclass(frozen=True)
class Hypo2Result:
    margin: float
    holds: bool
    barrier: float            # f(z_1) - f(x_0)
    spread: float             # f(z_n) - f(z_1)


def check_hypo2(inventory):
    """Well depth vs boundary-minima spread: f(z1) - f(x0) > f(zn) - f(z1)."""
    f1 = inventory.boundary_minima[0].f_z
    fn = inventory.boundary_minima[-1].f_z
    barrier = f1 - inventory.f_x0
    spread = fn - f1
    margin = barrier - spread
    return Hypo2Result(margin=float(margin), holds=bool(margin > 0),
                       barrier=float(barrier), spread=float(spread))


def _agmonz1_applies(landscape, inventory, arcs):
    """Sufficient condition for hypo1 at the lowest of two boundary minima.

    With exactly two boundary minima, the strict gap d_a(z1, z2) >
    f(z2) - f(z1) certifies the hypothesis for z1 provided z2 is the
    unique global minimum of f restricted to the basin complement; that
    holds when every non-minimum boundary critical point sits strictly
    above f(z2), which we check on the separator inventory.
    """
    if inventory.n != 2:
        return False
    f_z2 = inventory.boundary_minima[1].f_z
    L = landscape.domain.boundary_length
    sep_s = [np.mod(lo, L) for lo, _, _ in arcs]
    for s in sep_s:
        if float(landscape.boundary_value(s)) <= f_z2 + 1e-12:
            return False
    return True


def check_hypo1(landscape, inventory, method="auto", resolution=0.02,
                radii=(1.0 / 3.0, 2.0 / 3.0), grid_resolution=4096,
                margin=1e-6):
    """Per-minimum verdicts on the basin-separation hypothesis.

    For each boundary minimum z_i the hypothesis requires
    inf over the basin complement of d_a(., z_i) to exceed
    max[f(z_n) - f(z_i), f(z_i) - f(z_1)].

    Methods: ``agmonz1`` and ``annulus`` certify passes (lower bounds),
    ``dijkstra`` certifies failures (upper bounds); ``auto`` tries them in
    that order.  A bound falling within ``margin`` above the threshold
    raises :class:`InconclusiveBound`.
    """
    if method not in ("auto", "agmonz1", "annulus", "dijkstra"):
        raise ValueError(f"unknown method {method!r}")
    dom = landscape.domain
    if landscape.dimension == 1:
        # a one-dimensional boundary complement is the opposite endpoint;
        # the energy bound alone gives d_a >= |f(z_i) - f(z_j)| and the
        # strict gap makes the hypothesis automatic
        entries = []
        f1 = inventory.boundary_minima[0].f_z
        fn = inventory.boundary_minima[-1].f_z
        for i, m in enumerate(inventory.boundary_minima, start=1):
            thr = max(fn - m.f_z, m.f_z - f1)
            entries.append(Hypo1Entry(index=i, threshold=float(thr), verdict="pass",
                                      certified=True, method="interval",
                                      value=float("inf"),
                                      note="automatic in dimension one"))
        return entries

    arcs = basin_arcs(landscape, inventory, grid_resolution)
    L = dom.boundary_length
    f1 = inventory.boundary_minima[0].f_z
    fn = inventory.boundary_minima[-1].f_z
    # complement samples per minimum (basin labels on a dense boundary grid)
    s_samples = np.linspace(0.0, L, 4096, endpoint=False)
    labels = basin_index_of(landscape, inventory, s_samples, _arcs=arcs)
    b_points = dom.boundary_point(s_samples)

    mesh = None
    entries = []
    for i, m in enumerate(inventory.boundary_minima, start=1):
        thr = float(max(fn - m.f_z, m.f_z - f1))
        comp_mask = labels != (i - 1)
        comp_pts = b_points[comp_mask]

        if method in ("auto", "agmonz1") and i == 1 and \
                _agmonz1_applies(landscape, inventory, arcs):
            entries.append(Hypo1Entry(
                index=i, threshold=thr, verdict="pass", certified=True,
                method="agmonz1", value=thr,
                note="strict Agmon gap between the two boundary minima"))
            continue
        if method == "agmonz1":
            entries.append(Hypo1Entry(
                index=i, threshold=thr, verdict="inconclusive", certified=False,
                method="agmonz1", value=float("nan"),
                note="sufficient condition not applicable"))
            continue

        if method in ("auto", "annulus"):
            try:
                ab = lower_bound_annulus(landscape, m.z, radii[0], radii[1],
                                         B=comp_pts)
                if ab.bound > thr + margin:
                    entries.append(Hypo1Entry(
                        index=i, threshold=thr, verdict="pass", certified=True,
                        method="annulus", value=float(ab.bound),
                        note=f"alpha={ab.alpha:.6g}, inf g={ab.inf_g:.6g}"))
                    continue
                if ab.bound > thr:
                    raise InconclusiveBound(
                        f"annulus bound {ab.bound:.8g} within {margin} above "
                        f"threshold {thr:.8g} for minimum {i}")
                if method == "annulus":
                    entries.append(Hypo1Entry(
                        index=i, threshold=thr, verdict="fail", certified=False,
                        method="annulus", value=float(ab.bound),
                        note="bound below threshold; annulus cannot certify"))
                    continue
            except (EmptyAnnulus, AlphaNonPositive) as err:
                if method == "annulus":
                    entries.append(Hypo1Entry(
                        index=i, threshold=thr, verdict="inconclusive",
                        certified=False, method="annulus", value=float("nan"),
                        note=str(err)))
                    continue

        # dijkstra estimate: min graph distance from z_i to complement samples
        if mesh is None:
            mesh = build_mesh(landscape, resolution)
        src, _ = mesh.nearest_node(m.z)
        dist = _csgraph_dijkstra(mesh.graph, indices=src)
        node_labels = basin_index_of(landscape, inventory,
                                     mesh.boundary_s[mesh.boundary_mask], _arcs=arcs)
        comp_nodes = np.nonzero(mesh.boundary_mask)[0][node_labels != (i - 1)]
        if comp_nodes.size == 0:
            entries.append(Hypo1Entry(
                index=i, threshold=thr, verdict="inconclusive", certified=False,
                method="dijkstra", value=float("nan"),
                note="no complement samples on the mesh"))
            continue
        est = float(np.min(dist[comp_nodes])) + _snap_cost(landscape, m.z,
                                                           mesh.nodes[src])
        if est < thr - margin:
            entries.append(Hypo1Entry(
                index=i, threshold=thr, verdict="fail", certified=True,
                method="dijkstra", value=est,
                note="a path to the basin complement undercuts the threshold"))
        else:
            entries.append(Hypo1Entry(
                index=i, threshold=thr, verdict="inconclusive", certified=False,
                method="dijkstra", value=est,
                note="path estimate above threshold; upper bounds cannot certify"))
    return entries
