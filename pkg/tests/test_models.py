import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kstest

from qcopula.copula import DiscreteDistribution2D, bin_2d
from qcopula.evaluation import ks2d_test
from qcopula.models import (
    CganConfig,
    GaussianCopulaModel,
    QcbmConfig,
    QganConfig,
    discriminator_loss,
    fit_gaussian_copula,
    generate,
    generator_loss,
    normal_quantile,
    qcbm_cost,
    sample_circuits,
    sample_gaussian_copula,
    train_classical_gan,
    train_qcbm,
    train_qgan,
)
from qcopula.models.losses import discriminator_loss_grad, generator_loss_grad, kl_divergence
from qcopula.optim import SpsaConfig
from qcopula.qopula import QopulaSpec, param_count, register_marginals, transfer_params
from qcopula.records import read_log
from qcopula.statevec import NoiseConfig

LOG2 = math.log(2)


def uniform_target(bins):
    return DiscreteDistribution2D(bins, np.full((bins, bins), 1 / bins**2))


def correlated_points(n, rho, seed):
    return sample_gaussian_copula(GaussianCopulaModel(rho), n, seed)


# -- losses ---------------------------------------------------------------------


def test_qcbm_cost_examples():
    p = np.array([0.2, 0.3, 0.5])
    assert qcbm_cost(p, p) == 0
    assert qcbm_cost([1.0, 0.0], [0.5, 0.5]) == pytest.approx(0.693147, abs=1e-6)
    expected = 0.5 * math.log(0.5 / 1e-6) + 0.5 * math.log(0.5)
    assert qcbm_cost([0.5, 0.5], [1.0, 0.0], clip=1e-6) == pytest.approx(expected)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 20))
def test_qcbm_cost_non_negative(seed, size):
    rng = np.random.default_rng(seed)
    q = rng.dirichlet(np.ones(size))
    p = rng.dirichlet(np.ones(size))
    assert qcbm_cost(q, p) >= -1e-12
    assert qcbm_cost(q, q) == pytest.approx(0, abs=1e-12)


def test_bce_losses_at_half():
    half = np.full(10, 0.5)
    assert discriminator_loss(half, half) == pytest.approx(LOG2, abs=1e-15)
    assert generator_loss(half) == pytest.approx(LOG2, abs=1e-15)


def test_bce_limits_and_clipping():
    assert discriminator_loss(np.full(4, 1 - 1e-15), np.full(4, 1e-15)) == pytest.approx(0, abs=1e-12)
    assert np.isfinite(discriminator_loss(np.full(3, 0.5), np.ones(3)))
    assert generator_loss(np.full(3, 1.0)) == 0
    big = generator_loss(np.zeros(3))
    assert np.isfinite(big) and big > 20


def test_bce_gradients_match_differences():
    rng = np.random.default_rng(0)
    dr, df = rng.uniform(0.1, 0.9, 6), rng.uniform(0.1, 0.9, 6)
    gr, gf = discriminator_loss_grad(dr, df)
    gg = generator_loss_grad(df)
    h = 1e-7
    for i in range(6):
        e = np.eye(6)[i] * h
        assert gr[i] == pytest.approx((discriminator_loss(dr + e, df) - discriminator_loss(dr - e, df)) / (2 * h), rel=1e-5)
        assert gf[i] == pytest.approx((discriminator_loss(dr, df + e) - discriminator_loss(dr, df - e)) / (2 * h), rel=1e-5)
        assert gg[i] == pytest.approx((generator_loss(df + e) - generator_loss(df - e)) / (2 * h), rel=1e-5)


# -- Gaussian copula ----------------------------------------------------------------


def erf_quantile(p):
    """Independent normal quantile by bisection on math.erf."""
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if 0.5 * (1 + math.erf(mid / math.sqrt(2))) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def test_normal_quantile_values():
    assert normal_quantile(0.5) == 0
    assert normal_quantile(0.975) == pytest.approx(1.95996398, abs=1e-8)
    assert normal_quantile(0.975) == pytest.approx(erf_quantile(0.975), abs=1e-9)
    with pytest.raises(ValueError):
        normal_quantile(1.0)


def test_normal_quantile_round_trip():
    grid = np.linspace(1e-6, 1 - 1e-6, 501)
    cdf = np.array([0.5 * math.erfc(-z / math.sqrt(2)) for z in normal_quantile(grid)])
    assert np.max(np.abs(cdf - grid)) <= 1e-8
    for p in (1e-4, 0.1, 0.37, 0.8):
        assert normal_quantile(p) == pytest.approx(erf_quantile(p), abs=1e-8)


def test_gaussian_fit_independent_and_comonotone():
    rng = np.random.default_rng(1)
    assert abs(fit_gaussian_copula(rng.random((10**4, 2))).rho) <= 0.05
    u = rng.random(100) * 0.98 + 0.01
    assert fit_gaussian_copula(np.column_stack([u, u])).rho == 0.999


@pytest.mark.parametrize("rho", [-0.8, 0.0, 0.5, 0.6, 0.9])
def test_gaussian_round_trip(rho):
    fitted = fit_gaussian_copula(correlated_points(10**4, rho, 2))
    assert abs(fitted.rho - rho) <= 0.05


def test_gaussian_sample_marginals_uniform():
    for rho in (0.0, 0.7, -0.95):
        pts = correlated_points(5000, rho, 3)
        for col in pts.T:
            assert kstest(col, "uniform").pvalue >= 0.05


def test_gaussian_zero_rho_is_independent():
    pts = correlated_points(500, 0.0, 4)
    ref = np.random.default_rng(5).random((500, 2))
    assert ks2d_test(pts, ref, 200, 0).p_value >= 0.05


def test_gaussian_high_rho_hugs_diagonal():
    pts = correlated_points(2000, 0.999, 6)
    assert np.median(np.abs(pts[:, 0] - pts[:, 1])) < 0.02


def test_gaussian_model_persistence(tmp_path):
    GaussianCopulaModel(0.4).save(tmp_path / "g.json")
    assert GaussianCopulaModel.load(tmp_path / "g.json").rho == 0.4
    with pytest.raises(ValueError):
        GaussianCopulaModel(1.0)


# -- QCBM -----------------------------------------------------------------------------


def test_qcbm_initial_cost_from_zero_angles():
    spec = QopulaSpec(2, 3, 1, 0)
    config = QcbmConfig(uniform_target(8), spec, SpsaConfig(0.5, 0.1, 0.101, 40), 4000, theta0=np.zeros(24))
    result = train_qcbm(config)
    # the entangler puts mass 1/8 on each diagonal cell: KL to uniform is log 8
    assert result.costs[0] == pytest.approx(math.log(8), abs=0.02)
    assert result.costs.min() < result.costs[0]


def test_qcbm_best_so_far_and_returned_theta(tmp_path):
    target = bin_2d(correlated_points(2000, 0.6, 7), 4)
    spec = QopulaSpec(2, 2, 1, 0)
    config = QcbmConfig(target, spec, SpsaConfig(0.5, 0.1, 0.101, 30), 500, seed=3)
    result = train_qcbm(config, tmp_path / "log.jsonl")
    costs = result.costs
    assert np.all(np.diff(np.minimum.accumulate(costs)) <= 0)
    assert result.best_iteration == int(np.argmin(costs)) + 1
    assert np.array_equal(result.theta, result.log[result.best_iteration - 1].theta_snapshot)
    assert [r.metrics["kl"] for r in read_log(tmp_path / "log.jsonl")] == list(costs)
    top = result.best_thetas(4)
    assert len(top) == 4 and np.array_equal(top[0], result.theta)


def test_qcbm_log_is_deterministic(tmp_path):
    target = bin_2d(correlated_points(1000, 0.3, 8), 2)
    config = QcbmConfig(target, QopulaSpec(2, 1, 1, 0), SpsaConfig(0.5, 0.5, 0.101, 10), 100, seed=9)
    train_qcbm(config, tmp_path / "a.jsonl")
    train_qcbm(config, tmp_path / "b.jsonl")
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()


def test_qcbm_transfer_initialisation():
    small, large = QopulaSpec(2, 1, 1, 0), QopulaSpec(2, 2, 1, 0)
    target_small = bin_2d(correlated_points(2000, 0.7, 10), 2)
    res = train_qcbm(QcbmConfig(target_small, small, SpsaConfig(0.5, 0.1, 0.101, 20), 500, seed=1))
    theta0 = transfer_params(res.theta, small, large)
    target_large = bin_2d(correlated_points(2000, 0.7, 10), 4)
    cfg = QcbmConfig(target_large, large, SpsaConfig(0.5, 0.1, 0.101, 1), 500, seed=2, theta0=theta0)
    first = train_qcbm(cfg).log[0].theta_snapshot
    assert np.array_equal(first, theta0)
    assert np.count_nonzero(theta0) <= param_count(small)


def test_qcbm_config_validation():
    with pytest.raises(ValueError):
        QcbmConfig(uniform_target(4), QopulaSpec(2, 3, 1))
    with pytest.raises(ValueError):
        QcbmConfig(uniform_target(8), QopulaSpec(2, 3, 1), kl_direction="both")
    with pytest.raises(ValueError):
        train_qcbm(QcbmConfig(uniform_target(8), QopulaSpec(2, 3, 1), theta0=np.zeros(5)))


def test_forward_kl_option():
    spec = QopulaSpec(2, 1, 1, 0)
    config = QcbmConfig(uniform_target(2), spec, SpsaConfig(0.5, 0.5, 0.101, 3), 200, kl_direction="forward")
    assert len(train_qcbm(config).log) == 3


def test_sample_circuits_pools_each_theta():
    spec = QopulaSpec(2, 2, 1, 5)
    thetas = [np.zeros(param_count(spec)), np.full(param_count(spec), 0.3)]
    pts = sample_circuits(spec, thetas, 50, seed=0)
    assert pts.shape == (100, 2)
    assert np.all((pts > 0) & (pts < 1))


# -- QGAN -----------------------------------------------------------------------------


def test_qgan_defaults_match_published_values():
    cfg = QganConfig()
    assert (cfg.spsa.a, cfg.spsa.c, cfg.spsa.gamma, cfg.spsa.iterations) == (0.008, 0.01, 0.101, 5)
    assert (cfg.disc_lr, cfg.batch, cfg.iterations) == (0.0015, 2048, 1000)
    assert param_count(cfg.spec) == 24


def test_qgan_short_run(tmp_path):
    real = correlated_points(3000, 0.5, 11)
    cfg = QganConfig(QopulaSpec(2, 2, 1, 10), batch=256, iterations=5, seed=4)
    result = train_qgan(cfg, real, tmp_path / "q.jsonl")
    assert len(result.log) == 5
    assert all(set(r.metrics) == {"loss_g", "loss_d"} for r in result.log)
    assert (tmp_path / "q.jsonl").read_text().count("\n") == 5
    marg = register_marginals(QopulaSpec(2, 2, 1, 0), result.theta)
    assert np.allclose(marg, 0.25, atol=1e-10)
    again = train_qgan(cfg, real, tmp_path / "q2.jsonl")
    assert (tmp_path / "q.jsonl").read_bytes() == (tmp_path / "q2.jsonl").read_bytes()
    assert np.array_equal(result.theta, again.theta)


def test_qgan_losses_settle_near_log2():
    real = correlated_points(3000, 0.5, 12)
    log = train_qgan(QganConfig(iterations=500, seed=0), real).log
    losses = np.array([[r.metrics["loss_g"], r.metrics["loss_d"]] for r in log])
    early, late = losses[100:200].mean(axis=0), losses[400:].mean(axis=0)
    assert np.all(np.abs(late - LOG2) < 0.01)
    assert abs(late[0] - late[1]) < abs(early[0] - early[1])


def test_qgan_with_noise_runs():
    real = correlated_points(500, 0.5, 13)
    cfg = QganConfig(QopulaSpec(2, 1, 1, 5), batch=64, iterations=3, seed=1, noise=NoiseConfig(0.04))
    result = train_qgan(cfg, real)
    assert np.all(np.isfinite([r.metrics["loss_g"] for r in result.log]))


def test_qgan_rejects_points_outside_unit_square():
    with pytest.raises(ValueError):
        train_qgan(QganConfig(iterations=1), np.array([[0.0, 0.5]]))
    with pytest.raises(ValueError):
        train_qgan(QganConfig(iterations=1), np.array([[0.2, 0.5, 0.1]]))


# -- classical GAN -------------------------------------------------------------------


def test_cgan_defaults_and_short_run(tmp_path):
    cfg = CganConfig()
    assert (cfg.learning_rate, cfg.iterations) == (0.0001, 20000)
    real = correlated_points(1000, 0.5, 14)
    result = train_classical_gan(CganConfig(batch=128, iterations=20, seed=3), real, tmp_path / "c.jsonl")
    assert result.generator.param_count() == 24
    assert len(result.log) == 20
    out = generate(result.generator, 500, 0)
    assert out.shape == (500, 2) and np.all((out > 0) & (out < 1))
    again = train_classical_gan(CganConfig(batch=128, iterations=20, seed=3), real, tmp_path / "c2.jsonl")
    assert (tmp_path / "c.jsonl").read_bytes() == (tmp_path / "c2.jsonl").read_bytes()


def test_cgan_generator_learns_from_discriminator():
    # with a larger learning rate the generator's mean drifts toward the data
    real = np.clip(np.random.default_rng(15).normal(0.8, 0.05, (2000, 2)), 0.01, 0.99)
    result = train_classical_gan(CganConfig(batch=256, iterations=1500, learning_rate=0.01, seed=0), real)
    start = generate(train_classical_gan(CganConfig(batch=256, iterations=1, learning_rate=0.01, seed=0), real).generator, 2000, 1)
    end = generate(result.generator, 2000, 1)
    assert np.linalg.norm(end.mean(axis=0) - 0.8) < np.linalg.norm(start.mean(axis=0) - 0.8)


def test_kl_divergence_shape_check():
    with pytest.raises(ValueError):
        kl_divergence([0.5, 0.5], [1.0])
