import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from rankagg import (Dataset, DegenerateLikelihoodWarning, IntervalError, MCEMConfig,
                     NormalRUMParams, ValidationError, empirical_pairwise, fit_normal_mcem,
                     normal_nll, normal_pairwise, normal_ranking_loglik, sample_normal_rum,
                     truncated_normal_sample)
from rankagg.normal_rum import gibbs_chain, gibbs_estep, truncnorm_draw

from oracles import pairwise_zscores, rum_frequency

FAST = MCEMConfig(gibbs_samples=10, burn_in=5, max_em_iters=40, max_gibbs_samples=60)


# -- params ----------------------------------------------------------------

def test_params_are_pinned():
    params = NormalRUMParams([2.0, 3.0, 1.0], [2.0, 1.0, 4.0], reference=0)
    assert params.means[0] == 0.0 and params.sds[0] == 1.0
    np.testing.assert_allclose(params.means, [0.0, 0.5, -0.5])
    np.testing.assert_allclose(params.sds, [1.0, 0.5, 2.0])
    assert params.n_parameters == 6


def test_params_validation():
    with pytest.raises(ValidationError):
        NormalRUMParams([0.0, 1.0], [1.0, 0.0])
    with pytest.raises(ValidationError):
        NormalRUMParams([0.0, 1.0], [1.0, 1.0], reference=2)


@settings(max_examples=100)
@given(st.integers(2, 6).flatmap(lambda m: st.tuples(
    st.lists(st.floats(-3, 3), min_size=m, max_size=m),
    st.lists(st.floats(0.2, 3), min_size=m, max_size=m),
    st.floats(0.1, 10), st.floats(-10, 10), st.integers(0, m - 1))))
def test_affine_map_leaves_pairwise_unchanged(case):
    means, sds, scale, shift, ref = case
    a = NormalRUMParams(means, sds)
    b = NormalRUMParams(np.asarray(means) * scale + shift, np.asarray(sds) * scale)
    np.testing.assert_allclose(normal_pairwise(a).p, normal_pairwise(b).p, atol=1e-12)
    np.testing.assert_allclose(normal_pairwise(a.repin(ref)).p, normal_pairwise(a).p, atol=1e-12)


# -- truncated normal ------------------------------------------------------

def test_truncnorm_untruncated_mean():
    rng = np.random.default_rng(0)
    x = truncnorm_draw(np.zeros(100_000), 1.0, -np.inf, np.inf, rng)
    assert abs(x.mean()) <= 0.01


@pytest.mark.parametrize("lo", [8.0, 30.0, 200.0])
def test_truncnorm_deep_upper_tail(lo):
    rng = np.random.default_rng(1)
    x = truncnorm_draw(np.zeros(1000), 1.0, lo, np.inf, rng)
    assert np.all(np.isfinite(x)) and np.all(x >= lo)
    # the conditional excess over lo is roughly exponential with mean 1/lo
    assert abs((x - lo).mean() * lo - 1) < 0.15


def test_truncnorm_deep_lower_and_narrow():
    rng = np.random.default_rng(2)
    x = truncnorm_draw(np.zeros(1000), 1.0, -41.0, -40.0, rng)
    assert np.all((x > -41.0) & (x < -40.0))
    y = truncnorm_draw(np.full(1000, 3.0), 0.5, 40.0, 40.0 + 1e-9, rng)
    assert np.all((y >= 40.0) & (y <= 40.0 + 1e-9))


def test_truncnorm_symmetric_interval_moments():
    rng = np.random.default_rng(3)
    n = 100_000
    x = truncnorm_draw(np.zeros(n), 1.0, -1.0, 1.0, rng)
    dist = stats.truncnorm(-1.0, 1.0)
    var = dist.var()
    assert var == pytest.approx(0.2912, abs=1e-4)
    mu4 = dist.moment(4)
    assert abs(x.mean()) <= 3 * math.sqrt(var / n)
    assert abs(x.var() - var) <= 3 * math.sqrt((mu4 - var ** 2) / n)


@pytest.mark.parametrize("mean,sd,lo,hi", [(0.5, 2.0, -1.0, 3.0), (-2.0, 0.3, 1.0, np.inf),
                                           (1.0, 1.0, -np.inf, -2.0)])
def test_truncnorm_ks_vs_scipy(mean, sd, lo, hi):
    rng = np.random.default_rng(4)
    x = truncnorm_draw(np.full(20_000, mean), sd, lo, hi, rng)
    dist = stats.truncnorm((lo - mean) / sd, (hi - mean) / sd, loc=mean, scale=sd)
    assert stats.kstest(x, dist.cdf).pvalue > 0.01


def test_truncated_normal_sample_scalar():
    v = truncated_normal_sample(0.0, 1.0, 8.0, np.inf, rng=5)
    assert isinstance(v, float) and v >= 8.0
    with pytest.raises(IntervalError):
        truncated_normal_sample(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(IntervalError):
        truncnorm_draw([0.0], [1.0], [2.0], [1.0], np.random.default_rng())


# -- Gibbs E-step ----------------------------------------------------------

def test_gibbs_two_alternatives_order_statistics():
    params = NormalRUMParams([0.0, 0.0], [1.0, 1.0])
    cfg = MCEMConfig(gibbs_samples=40_000, burn_in=50, max_gibbs_samples=40_000)
    ex, ex2 = gibbs_estep([0, 1], params, cfg, rng=7)
    target = 1 / math.sqrt(math.pi)
    assert target == pytest.approx(0.5642, abs=1e-4)
    # rejection oracle for the same conditional expectation
    z = np.random.default_rng(8).standard_normal((400_000, 2))
    keep = z[z[:, 0] > z[:, 1]]
    assert keep[:, 0].mean() == pytest.approx(target, abs=0.005)
    assert ex[0] == pytest.approx(target, abs=0.02)
    assert ex[1] == pytest.approx(-target, abs=0.02)
    np.testing.assert_allclose(ex2, [1.0, 1.0], atol=0.03)


def test_gibbs_respects_ranking():
    params = NormalRUMParams([0.0, 1.0, -0.5, 2.0], [1.0, 0.3, 2.0, 0.8])
    cfg = MCEMConfig(gibbs_samples=500, burn_in=5, max_gibbs_samples=500)
    ranking = (2, 0, 3, 1)
    states = gibbs_chain(ranking, params, cfg, rng=9)
    assert states.shape == (500, 4)
    ordered = states[:, list(ranking)]
    assert np.all(ordered[:, :-1] > ordered[:, 1:])
    ex, _ = gibbs_estep(ranking, params, cfg, rng=9)
    assert np.all(np.diff(ex[list(ranking)]) < 0)


def test_gibbs_symmetric_params_truncation_ordering():
    params = NormalRUMParams([0.0, 0.0], [1.0, 1.0])
    ex, _ = gibbs_estep([1, 0], params, MCEMConfig(), rng=0)
    assert ex[1] > ex[0]


# -- MC-EM -----------------------------------------------------------------

def test_mcem_uniform_data_is_symmetric():
    data = Dataset.from_rankings(list(itertools.permutations(range(3))) * 200)
    fit = fit_normal_mcem(data, FAST)
    assert np.ptp(fit.means) <= 0.05
    assert np.ptp(fit.sds) <= 0.1


def test_mcem_saturated_two_alternatives():
    data = Dataset.from_rankings([[0, 1]] * 700 + [[1, 0]] * 300)
    fit = fit_normal_mcem(data, FAST)
    assert normal_pairwise(fit).p[0, 1] == pytest.approx(0.7, abs=0.01)


def test_mcem_deterministic_and_callback():
    data = Dataset(sample_normal_rum(NormalRUMParams([0, -0.5, -1.0], [1, 0.5, 1.5]), 300, 1))
    seen = []
    a = fit_normal_mcem(data, FAST, callback=lambda it, p: seen.append(it))
    b = fit_normal_mcem(data, FAST)
    np.testing.assert_array_equal(a.means, b.means)
    np.testing.assert_array_equal(a.sds, b.sds)
    assert seen == list(range(len(seen))) and 1 <= len(seen) <= FAST.max_em_iters


def test_mcem_reference_pin():
    data = Dataset(sample_normal_rum(NormalRUMParams([0, -0.5, -1.0], [1, 0.5, 1.5]), 300, 2))
    cfg = MCEMConfig(**{**FAST.__dict__, "reference": 2})
    fit = fit_normal_mcem(data, cfg)
    assert fit.reference == 2 and fit.means[2] == 0.0 and fit.sds[2] == 1.0


def test_mcem_sd_floor_is_flagged():
    data = Dataset.from_rankings([[0, 1, 2]] * 5 + [[1, 0, 2]])
    cfg = MCEMConfig(gibbs_samples=5, burn_in=2, max_em_iters=3, max_gibbs_samples=5, sd_floor=50.0)
    with pytest.warns(DegenerateLikelihoodWarning):
        fit = fit_normal_mcem(data, cfg)
    assert fit.floored


def test_mcem_rejects_bad_input():
    with pytest.raises(ValidationError):
        fit_normal_mcem(Dataset.from_rankings([[0, 1]]))
    with pytest.raises(ValidationError):
        MCEMConfig(gibbs_samples=0)
    with pytest.raises(ValidationError):
        MCEMConfig(burn_in=-1)


def test_mcem_schedule():
    cfg = MCEMConfig(gibbs_samples=50, growth=1.5, max_gibbs_samples=2000)
    assert [cfg.samples_at(i) for i in range(3)] == [50, 75, 112]
    assert cfg.samples_at(100) == 2000


# -- pairwise --------------------------------------------------------------

def test_pairwise_equal_means():
    p = normal_pairwise(NormalRUMParams([0.0, 0.0, 0.0], [1.0, 3.0, 0.2])).p
    np.testing.assert_allclose(p, 0.5, atol=1e-15)


def test_pairwise_unit_gap():
    p = normal_pairwise(NormalRUMParams([1.0, 0.0], [1.0, 1.0]).repin(1)).p
    expected = 0.5 * (1 + math.erf(1 / math.sqrt(2) / math.sqrt(2)))
    assert p[0, 1] == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.76025, abs=1e-5)


def test_pairwise_matches_sampler():
    params = NormalRUMParams([0.0, 0.4, -0.3, -1.0], [1.0, 0.5, 2.0, 0.8])
    z = pairwise_zscores(sample_normal_rum(params, 100_000, seed=3), normal_pairwise(params).p)
    assert np.all(np.abs(z) < 3)


def test_pairwise_can_be_non_monotone():
    params = NormalRUMParams([0.0, -0.5, -1.0, -1.5], [0.1, 0.1, 10.0, 0.1])
    order = np.argsort(-params.means)
    p = normal_pairwise(params).p[np.ix_(order, order)]
    rows_monotone = all(np.all(np.diff(np.delete(p[i], i)) >= 0) for i in range(4))
    assert not rows_monotone


# -- likelihood ------------------------------------------------------------

def test_loglik_two_way_tie():
    est, se = normal_ranking_loglik([0, 1], NormalRUMParams([0.0, 0.0], [1.0, 1.0]), 5000, 1)
    assert abs(est - math.log(0.5)) <= 3 * se + 1e-12


def test_loglik_symmetric_three():
    params = NormalRUMParams([0.0, 0.0, 0.0], [1.0, 1.0, 1.0])
    for r in itertools.permutations(range(3)):
        est, se = normal_ranking_loglik(r, params, 5000, 2)
        assert abs(est - math.log(1 / 6)) <= 3 * se


def test_loglik_matches_naive_frequency():
    means, sds = np.array([1.0, 0.0, -1.0]), np.array([1.0, 0.5, 2.0])
    params = NormalRUMParams(means, sds)
    total = 0.0
    for k, r in enumerate(itertools.permutations(range(3))):
        est, se = normal_ranking_loglik(r, params, 20_000, seed=k)
        p_is = math.exp(est)
        p_mc, se_mc = rum_frequency(r, means, sds, 1_000_000, seed=100 + k)
        assert abs(p_is - p_mc) <= 3 * math.hypot(p_is * se, se_mc)
        total += p_is
    assert total == pytest.approx(1.0, abs=0.01)


def test_loglik_requires_draws():
    with pytest.raises(ValidationError):
        normal_ranking_loglik([0, 1], NormalRUMParams([0.0, 0.0], [1.0, 1.0]), draws=99)


def test_nll_sums_rankings():
    params = NormalRUMParams([0.0, -0.4, -0.8], [1.0, 0.7, 1.3])
    data = Dataset.from_rankings([[0, 1, 2]] * 3 + [[2, 1, 0]])
    nll, se = normal_nll(data, params, draws=4000, seed=0)
    a, sa = normal_ranking_loglik([0, 1, 2], params, 200_000, seed=1)
    b, sb = normal_ranking_loglik([2, 1, 0], params, 200_000, seed=2)
    assert abs(nll + 3 * a + b) <= 3 * math.hypot(se, math.hypot(3 * sa, sb))
    assert se > 0


# -- sampling --------------------------------------------------------------

def test_sample_noiseless_limit():
    params = NormalRUMParams([0.3, 2.0, -1.0, 1.0], [1e-9] * 4)
    out = sample_normal_rum(params, 500, seed=0)
    assert (out == [1, 3, 0, 2]).all()


def test_sample_deterministic():
    params = NormalRUMParams([0.0, 1.0], [1.0, 2.0])
    np.testing.assert_array_equal(sample_normal_rum(params, 50, 4), sample_normal_rum(params, 50, 4))
    assert sample_normal_rum(params, 0, 4).shape == (0, 2)


def test_sample_empirical_matrix_is_valid():
    params = NormalRUMParams([0.0, 1.0, 0.5], [1.0, 2.0, 0.3])
    mat = empirical_pairwise(Dataset(sample_normal_rum(params, 1000, 5)))
    assert np.allclose(mat.p + mat.p.T, 1.0)
