import math

import numpy as np
import pytest

from wellexit import exitstats
from wellexit import landscape as ls
from wellexit import langevin as lg
from wellexit import qsd


def disc_bowl():
    pot = ls.CallablePotential(
        lambda x: x[..., 0] ** 2 + x[..., 1] ** 2, dimension=2,
        grad=lambda x: 2.0 * x,
        hess=lambda x: np.broadcast_to(2 * np.eye(2), x.shape + (2,)).copy(),
        name="bowl")
    return ls.make_landscape(pot, ls.DiscDomain(radius=1.0), name="bowl")


class TestGelmanRubin:
    def test_identical_chains_flagged(self):
        trace = np.linspace(0.0, 1.0, 50)
        diag = qsd.gelman_rubin(np.stack([trace, trace, trace]))
        np.testing.assert_allclose(diag.R, math.sqrt(49.0 / 50.0), rtol=1e-12)
        assert diag.window_too_short
        assert diag.R < 1.0

    def test_disjoint_chains_large(self, rng):
        a = rng.normal(0.0, 1.0, 200)
        b = rng.normal(50.0, 1.0, 200)
        diag = qsd.gelman_rubin(np.stack([a, b]))
        assert diag.R > 10.0

    def test_iid_normal_converges_to_one(self, rng):
        traces = rng.normal(size=(4, 20_000))
        diag = qsd.gelman_rubin(traces)
        assert abs(diag.R - 1.0) < 0.01
        assert not diag.window_too_short

    def test_constant_traces_raise(self):
        with pytest.raises(qsd.ZeroVariance):
            qsd.gelman_rubin(np.ones((3, 10)))

    def test_too_few_chains(self):
        with pytest.raises(ValueError):
            qsd.gelman_rubin(np.zeros((1, 10)))


class TestFvStep:
    def test_particle_count_conserved(self, quad_landscape):
        cfg = lg.SimConfig(dt=5e-3, h=1.2, seed=5)
        ens = qsd.FVEnsemble(quad_landscape, cfg, 0, 300)
        for _ in range(200):
            qsd.fv_step(ens)
            assert ens.n_particles == 300
            assert quad_landscape.domain.contains(ens.positions).all()
        assert ens.branch_count > 0

    def test_no_exit_is_plain_dynamics(self, quad_landscape):
        # with h = 0 from deep inside nobody exits: branch count stays zero
        cfg = lg.SimConfig(dt=1e-3, h=0.0, seed=6)
        start = np.tile(np.array([[0.05, 0.0], [0.1, 0.1]]), (5, 1))
        ens = qsd.FVEnsemble(quad_landscape, cfg, 0, 10, positions=start)
        for _ in range(50):
            qsd.fv_step(ens)
        assert ens.branch_count == 0

    def test_single_particle_rejected(self, quad_landscape):
        cfg = lg.SimConfig(dt=5e-3, h=0.5, seed=7)
        with pytest.raises(ValueError):
            qsd.FVEnsemble(quad_landscape, cfg, 0, 1)

    def test_all_exit_aborts(self):
        lan = disc_bowl()
        cfg = lg.SimConfig(dt=1e4, h=1e6, seed=8)
        ens = qsd.FVEnsemble(lan, cfg, 0, 16)
        with pytest.raises(qsd.AllParticlesExited):
            for _ in range(50):
                qsd.fv_step(ens)

    def test_determinism(self, quad_landscape):
        cfg = lg.SimConfig(dt=5e-3, h=1.0, seed=9)
        a = qsd.FVEnsemble(quad_landscape, cfg, 0, 128)
        b = qsd.FVEnsemble(quad_landscape, cfg, 0, 128)
        for _ in range(300):
            qsd.fv_step(a)
            qsd.fv_step(b)
        assert np.array_equal(a.positions, b.positions)
        assert a.branch_count == b.branch_count


class TestSampleQsd:
    def test_high_temperature_disc_converges_fast(self):
        lan = disc_bowl()
        cfg = lg.SimConfig(dt=2e-3, h=2.0, seed=10)
        qcfg = qsd.QsdConfig(n_particles=800, n_chains=4, r_threshold=1.02,
                             snapshot_stride=10, max_steps=40_000)
        res = qsd.sample_qsd(lan, cfg, qcfg)
        assert res.converged
        assert res.positions.shape == (800, 2)
        assert lan.domain.contains(res.positions).all()
        assert res.n_steps < 20_000

    def test_impossible_threshold_raises(self):
        lan = disc_bowl()
        cfg = lg.SimConfig(dt=2e-3, h=2.0, seed=10)
        qcfg = qsd.QsdConfig(n_particles=200, n_chains=4, r_threshold=0.0,
                             snapshot_stride=10, max_steps=600)
        with pytest.raises(qsd.NoConvergence) as err:
            qsd.sample_qsd(lan, cfg, qcfg)
        assert err.value.result is not None
        assert not err.value.result.converged

    def test_worker_invariance(self, quad_landscape):
        cfg = lg.SimConfig(dt=5e-3, h=1.0, seed=12)
        qcfg = qsd.QsdConfig(n_particles=400, n_chains=4, max_steps=20_000)
        a = qsd.sample_qsd(quad_landscape, cfg, qcfg, workers=1)
        b = qsd.sample_qsd(quad_landscape, cfg, qcfg, workers=4)
        assert np.array_equal(a.positions, b.positions)
        assert a.n_steps == b.n_steps

    def test_exit_times_exponential_from_qsd(self, quad_landscape,
                                             quad_inventory):
        # end-to-end sanity: exits from the sampled QSD have exponential
        # times (KS at a loose level for this modest sample size)
        cfg = lg.SimConfig(dt=5e-3, h=1.0, seed=13)
        qcfg = qsd.QsdConfig(n_particles=2000, n_chains=4, max_steps=40_000)
        res = qsd.sample_qsd(quad_landscape, cfg, qcfg, workers=2)
        log = lg.batch_exits(res.positions, quad_landscape, cfg, 3000,
                             workers=2)
        ks = exitstats.exponentiality_test(log.tau, alpha=0.001)
        assert ks.passed
