import numpy as np
import pytest

from wellexit import agmon
from wellexit import landscape as ls

RES = 0.02
# worst-case length distortion of radius-3 lattice paths vs straight lines
STENCIL_DISTORTION = 1.0131


@pytest.fixture(scope="module")
def quad_mesh(quad_landscape):
    return agmon.build_mesh(quad_landscape, RES)


@pytest.fixture(scope="module")
def quad_mesh_fine(quad_landscape):
    return agmon.build_mesh(quad_landscape, 0.01)


def interior_points(landscape, n, rng):
    box = landscape.domain.bounding_box()
    pts = []
    while len(pts) < n:
        cand = box[0] + (box[1] - box[0]) * rng.random((4 * n, 2))
        cand = cand[landscape.domain.contains(cand)]
        pts.extend(cand[: n - len(pts)])
    return np.asarray(pts)


class TestMesh:
    def test_weights_nonnegative(self, quad_mesh):
        assert quad_mesh.graph.data.min() >= 0.0

    def test_boundary_nodes_store_tangential_density(self, quad_landscape,
                                                     quad_mesh):
        b = quad_mesh.boundary_mask
        pts = quad_mesh.nodes[b]
        grad = quad_landscape.grad(pts)
        dn = quad_landscape.normal_derivative(points=pts)
        tangential = np.sqrt(np.maximum(
            np.linalg.norm(grad, axis=-1) ** 2 - dn ** 2, 0.0))
        assert np.max(np.abs(quad_mesh.g_values[b] - tangential)) < 1e-8

    def test_interior_nodes_store_full_gradient(self, quad_landscape,
                                                quad_mesh):
        i = ~quad_mesh.boundary_mask
        pts = quad_mesh.nodes[i]
        expect = np.linalg.norm(quad_landscape.grad(pts), axis=-1)
        np.testing.assert_allclose(quad_mesh.g_values[i], expect, atol=1e-12)


class TestPathLength:
    def test_constant_path_is_zero(self, quad_landscape):
        p = np.array([[0.1, 0.1]] * 3)
        assert agmon.path_length(p, quad_landscape) == 0.0

    def test_1d_monotone_segment(self, interval_landscape):
        # f = x^2; the trapezoid rule is exact for the linear density |2t|
        # on sign-constant segments
        val = agmon.path_length(np.array([[0.3], [1.4]]), interval_landscape)
        np.testing.assert_allclose(val, 1.4 ** 2 - 0.3 ** 2, rtol=1e-12)

    def test_straight_segment_through_well(self, quad_landscape):
        # integral of |2t - 0.1| from 0.05 to 0.5 equals 0.2025
        seg = np.array([[0.05, 0.0], [0.5, 0.0]])
        np.testing.assert_allclose(agmon.path_length(seg, quad_landscape),
                                   0.2025, rtol=1e-12)

    def test_outside_point_raises(self, quad_landscape):
        with pytest.raises(agmon.PointOutsideDomain):
            agmon.path_length(np.array([[0.0, 0.0], [3.0, 0.0]]),
                              quad_landscape)

    def test_boundary_segment_uses_tangential_density(self, quad_landscape):
        # on the right segment the tangential density is |2y|
        seg = np.array([[1.0, 0.2], [1.0, 0.6]])
        expect = 0.5 * (0.4 + 1.2) * 0.4
        np.testing.assert_allclose(agmon.path_length(seg, quad_landscape),
                                   expect, rtol=1e-9)


class TestDistanceUpper:
    def test_identity(self, quad_landscape, quad_mesh):
        d = agmon.distance_upper(quad_landscape, [0.3, 0.1], [0.3, 0.1],
                                 mesh=quad_mesh)
        assert d.upper < 1e-12

    def test_1d_exact(self, interval_landscape):
        d = agmon.distance_upper(interval_landscape, [-1.0], [2.0],
                                 resolution=0.01)
        # exact integral of |2t| over [-1, 2] with the kink at a node
        np.testing.assert_allclose(d.upper, 5.0, rtol=1e-12)
        np.testing.assert_allclose(d.lower, 3.0, rtol=1e-12)

    def test_near_minimum_identity(self, quad_landscape, quad_inventory,
                                   quad_mesh_fine):
        # gradient-flow identity: d(x0, x) = f(x) - f(x0) in the basin
        for target in ([0.3, 0.0], [0.05, 0.3], [0.25, 0.2], [-0.3, 0.12],
                       [0.2, -0.33]):
            d = agmon.distance_upper(quad_landscape, quad_inventory.x0,
                                     target, mesh=quad_mesh_fine)
            ref = float(quad_landscape.f(np.asarray(target))) - quad_inventory.f_x0
            assert abs(d.upper - ref) < 0.02 * ref

    def test_symmetry(self, quad_landscape, quad_mesh, rng):
        pts = interior_points(quad_landscape, 6, rng)
        for k in range(0, 6, 2):
            a = agmon.distance_upper(quad_landscape, pts[k], pts[k + 1],
                                     mesh=quad_mesh).upper
            b = agmon.distance_upper(quad_landscape, pts[k + 1], pts[k],
                                     mesh=quad_mesh).upper
            assert abs(a - b) <= 1e-3 * max(a, b, 1e-12)

    def test_triangle_inequality(self, quad_landscape, quad_mesh, rng):
        pts = interior_points(quad_landscape, 9, rng)
        for k in range(0, 9, 3):
            x, y, z = pts[k], pts[k + 1], pts[k + 2]
            dxy = agmon.distance_upper(quad_landscape, x, y, mesh=quad_mesh).upper
            dyz = agmon.distance_upper(quad_landscape, y, z, mesh=quad_mesh).upper
            dxz = agmon.distance_upper(quad_landscape, x, z, mesh=quad_mesh).upper
            assert dxz <= dxy + dyz + 1e-9

    def test_energy_and_lipschitz_bounds(self, quad_landscape, quad_mesh, rng):
        pts = interior_points(quad_landscape, 40, rng)
        c_max = float(np.max(quad_mesh.g_values))
        quad_tol = 1e-3
        for k in range(0, 40, 2):
            x, y = pts[k], pts[k + 1]
            mid = 0.5 * (x + y)
            if not quad_landscape.domain.contains(mid):
                continue  # chord bends around a reflex corner; skip
            d = agmon.distance_upper(quad_landscape, x, y, mesh=quad_mesh)
            assert d.upper >= abs(quad_landscape.f(x) - quad_landscape.f(y)) - quad_tol
            # graph paths cannot follow the chord exactly: allow the lattice
            # distortion factor plus snapping slack
            assert d.upper <= c_max * (STENCIL_DISTORTION * np.linalg.norm(x - y)
                                       + 2.0 * RES) + quad_tol

    def test_refinement_monotone(self, quad_landscape):
        pairs = [([0.05, 0.0], [0.6, 0.8]), ([-0.5, -0.3], [0.3, 1.5]),
                 ([0.0, -1.5], [0.0, 1.5])]
        coarse = agmon.build_mesh(quad_landscape, 0.04)
        fine = agmon.build_mesh(quad_landscape, 0.02)
        for x, y in pairs:
            dc = agmon.distance_upper(quad_landscape, x, y, mesh=coarse)
            df = agmon.distance_upper(quad_landscape, x, y, mesh=fine)
            slack = (dc.snap_error + df.snap_error) * float(np.max(coarse.g_values))
            assert df.upper <= dc.upper + slack + 1e-6

    def test_witness_path_length_matches(self, quad_landscape, quad_mesh):
        d = agmon.distance_upper(quad_landscape, [0.05, 0.0], [0.8, 1.2],
                                 mesh=quad_mesh)
        recomputed = agmon.path_length(d.witness_path, quad_landscape)
        # witness polyline re-measured by the trapezoid rule stays close to
        # the Simpson-weighted graph value
        np.testing.assert_allclose(recomputed, d.upper, rtol=5e-3, atol=1e-6)


class TestAnnulus:
    def test_reference_annulus_value(self, quad_landscape, quad_inventory):
        z2 = quad_inventory.boundary_minima[1].z
        b = agmon.lower_bound_annulus(quad_landscape, z2, 1.0 / 3.0, 2.0 / 3.0)
        np.testing.assert_allclose(b.alpha, 1.0 / 3.0, rtol=1e-12)
        np.testing.assert_allclose(b.inf_g, 2.0 / 3.0, rtol=1e-12)
        np.testing.assert_allclose(b.bound, 2.0 / 9.0, rtol=1e-12)

    def test_flat_potential_gives_zero(self):
        pot = ls.CallablePotential(lambda x: np.zeros(x.shape[:-1]),
                                   dimension=2,
                                   grad=lambda x: np.zeros_like(x),
                                   name="flat")
        lan = ls.make_landscape(pot, ls.DiscDomain(radius=2.0))
        b = agmon.lower_bound_annulus(lan, np.array([0.0, 0.0]), 0.3, 0.6)
        assert b.bound == 0.0

    def test_target_set_validation(self, quad_landscape, quad_inventory):
        z2 = quad_inventory.boundary_minima[1].z
        close = np.array([z2 + [0.4, 0.0]])
        with pytest.raises(agmon.EmptyAnnulus):
            agmon.lower_bound_annulus(quad_landscape, z2, 1 / 3, 2 / 3, B=close)

    def test_degenerate_radii(self, quad_landscape, quad_inventory):
        z2 = quad_inventory.boundary_minima[1].z
        with pytest.raises(agmon.AlphaNonPositive):
            agmon.lower_bound_annulus(quad_landscape, z2, 0.5, 0.5)

    def test_bound_below_distances(self, quad_landscape, quad_inventory,
                                   quad_mesh):
        z2 = quad_inventory.boundary_minima[1].z
        b = agmon.lower_bound_annulus(quad_landscape, z2, 1 / 3, 2 / 3)
        dom = quad_landscape.domain
        s = np.linspace(0, dom.boundary_length, 32, endpoint=False)
        targets = dom.boundary_point(s)
        far = targets[np.linalg.norm(targets - z2, axis=1) > 2.0 / 3.0 + 0.05]
        dists = agmon.distances_from(quad_landscape, z2, far, mesh=quad_mesh)
        assert np.all(b.bound <= dists + 1e-9)


class TestHypo1:
    def test_quadratic_passes(self, quad_landscape, quad_inventory):
        entries = agmon.check_hypo1(quad_landscape, quad_inventory)
        assert [e.verdict for e in entries] == ["pass", "pass"]
        assert all(e.certified for e in entries)
        # division of labor: strict-gap argument for z1,
        # annulus bound for z2
        assert entries[0].method == "agmonz1"
        assert entries[1].method == "annulus"
        np.testing.assert_allclose(entries[1].value, 2.0 / 9.0, rtol=1e-12)

    def test_threshold_at_one_ninth(self):
        # the annulus bound 2/9 certifies exactly when 2a < 2/9, i.e. a < 1/9
        for a, expected in ((0.1, "pass"), (0.11, "pass"), (0.112, "fail")):
            lan = ls.make_builtin_landscape("quadratic-disc-caps", {"a": a},
                                            strict=False)
            inv = ls.build_inventory(lan)
            entries = agmon.check_hypo1(lan, inv, method="annulus")
            assert entries[1].verdict == expected, f"a={a}"

    def test_above_range_annulus_cannot_certify(self):
        lan = ls.make_builtin_landscape("quadratic-disc-caps", {"a": 0.12},
                                        strict=False)
        inv = ls.build_inventory(lan)
        entries = agmon.check_hypo1(lan, inv, method="annulus")
        assert all(e.verdict in ("fail", "inconclusive") for e in entries)
        np.testing.assert_allclose(entries[1].value, 2.0 / 9.0, rtol=1e-12)

    def test_knife_edge_raises_inconclusive(self):
        a = 1.0 / 9.0 - 2e-7
        lan = ls.make_builtin_landscape("quadratic-disc-caps", {"a": a})
        inv = ls.build_inventory(lan)
        with pytest.raises(agmon.InconclusiveBound):
            agmon.check_hypo1(lan, inv, method="annulus")

    def test_corniche_fails(self, corniche_landscape, corniche_inventory):
        entries = agmon.check_hypo1(corniche_landscape, corniche_inventory)
        by_index = {e.index: e for e in entries}
        # the flat channels give a near-zero-cost path from z2 to the
        # complement of its basin
        assert by_index[2].verdict == "fail"
        assert by_index[2].certified
        assert by_index[2].value < 0.1 * by_index[2].threshold

    def test_1d_automatic(self, interval_landscape, interval_inventory):
        entries = agmon.check_hypo1(interval_landscape, interval_inventory)
        assert all(e.verdict == "pass" for e in entries)


class TestHypo2:
    def test_quadratic_margin(self, quad_inventory):
        res = agmon.check_hypo2(quad_inventory)
        np.testing.assert_allclose(res.margin, 0.9025 - 0.2, atol=1e-10)
        assert res.holds

    def test_family_condition(self, quad_inventory):
        # for this family the margin equals 1 - 3a + a^2/4
        a = 0.1
        res = agmon.check_hypo2(quad_inventory)
        np.testing.assert_allclose(res.margin, 1 - 3 * a + a * a / 4.0,
                                   atol=1e-10)

    def test_single_minimum_trivial(self):
        pot = ls.CallablePotential(
            lambda x: x[..., 0] ** 2 + x[..., 1] ** 2 - 0.2 * x[..., 0],
            dimension=2,
            grad=lambda x: np.stack([2 * x[..., 0] - 0.2, 2 * x[..., 1]],
                                    axis=-1),
            hess=lambda x: np.broadcast_to(2 * np.eye(2), x.shape + (2,)).copy(),
            name="single")
        lan = ls.make_landscape(pot, ls.DiscDomain(radius=1.0))
        inv = ls.build_inventory(lan)
        assert inv.n == 1
        res = agmon.check_hypo2(inv)
        assert res.holds
        np.testing.assert_allclose(res.spread, 0.0, atol=1e-12)
