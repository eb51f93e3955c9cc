"""Normal random utility model.

Each alternative ``j`` gets a latent utility ``x_j ~ N(mu_j, sd_j**2)``,
independent across alternatives, and a ranking sorts the realised utilities
in decreasing order.  Parameters are estimated by Monte Carlo EM: the E-step
Gibbs-samples latent utilities consistent with each observed ranking, the
M-step sets each mean and variance to the pooled sample moments.

The model is invariant to a common positive affine map of all utilities, so
one reference alternative is pinned to the standard normal.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import log_ndtr, logsumexp, ndtr, ndtri, ndtri_exp

from .core import Dataset, PairwiseMatrix, as_ranking
from .errors import (DegenerateLikelihoodWarning, DimensionError, IntervalError,
                     ValidationError)

SD_FLOOR = 1e-6
# below this lower-tail mass the inverse CDF is evaluated on the log scale
_LOG_PATH_BELOW = 1e-200


@dataclass(frozen=True, eq=False)
class NormalRUMParams:
    """Means and standard deviations, pinned so that alternative
    ``reference`` has mean 0 and standard deviation 1.

    Any positive ``sds`` are accepted; the constructor applies the affine map
    that pins the reference, which leaves every ranking probability unchanged.
    """

    means: np.ndarray
    sds: np.ndarray
    reference: int = 0
    floored: tuple[int, ...] = field(default=())

    def __post_init__(self):
        mu = np.array(self.means, dtype=float)
        sd = np.array(self.sds, dtype=float)
        if mu.ndim != 1 or mu.shape != sd.shape or mu.size == 0:
            raise DimensionError("means and sds must be vectors of equal length")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sd))) or np.any(sd <= 0):
            raise ValidationError("means must be finite and sds positive")
        ref = int(self.reference)
        if not 0 <= ref < mu.size:
            raise ValidationError(f"reference {ref} out of range")
        shift, scale = mu[ref], sd[ref]
        mu = (mu - shift) / scale
        sd = sd / scale
        mu[ref], sd[ref] = 0.0, 1.0
        for a in (mu, sd):
            a.setflags(write=False)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "sds", sd)
        object.__setattr__(self, "reference", ref)
        object.__setattr__(self, "floored", tuple(int(j) for j in self.floored))

    @property
    def m(self) -> int:
        return self.means.size

    @property
    def n_parameters(self) -> int:
        """Free parameters before the identifiability pin: a mean and a
        standard deviation per alternative."""
        return 2 * self.m

    def repin(self, reference: int) -> "NormalRUMParams":
        return NormalRUMParams(self.means, self.sds, reference, self.floored)


@dataclass(frozen=True)
class MCEMConfig:
    """Monte Carlo EM schedule.

    The number of retained Gibbs sweeps starts at ``gibbs_samples`` and grows
    by ``growth`` per EM iteration up to ``max_gibbs_samples``.  Iteration
    stops once the largest relative parameter change is below ``rel_tol``
    or after ``max_em_iters`` iterations.

    Every ranking carries its own chain, so each E-step pools
    ``n * samples`` draws per alternative; a few hundred sweeps per ranking
    already put the Monte Carlo error well below the sampling error of the
    estimates on datasets of thousands of rankings.
    """

    gibbs_samples: int = 20
    burn_in: int = 10
    max_em_iters: int = 100
    rel_tol: float = 1e-4
    seed: int = 0
    growth: float = 1.2
    max_gibbs_samples: int = 200
    reference: int = 0
    sd_floor: float = SD_FLOOR

    def __post_init__(self):
        if self.gibbs_samples < 1:
            raise ValidationError("gibbs_samples must be >= 1")
        if self.burn_in < 0:
            raise ValidationError("burn_in must be >= 0")
        if self.max_em_iters < 1:
            raise ValidationError("max_em_iters must be >= 1")
        if self.growth < 1.0 or self.max_gibbs_samples < self.gibbs_samples:
            raise ValidationError("sample schedule must be non-decreasing")
        if self.rel_tol < 0 or self.sd_floor <= 0:
            raise ValidationError("rel_tol must be >= 0 and sd_floor > 0")

    def samples_at(self, iteration: int) -> int:
        n = self.gibbs_samples * self.growth ** iteration
        return int(min(self.max_gibbs_samples, round(n)))


# -- truncated normal ------------------------------------------------------

def truncnorm_draw(mean, sd, lo, hi, rng) -> np.ndarray:
    """Vectorised draws from ``N(mean, sd**2)`` restricted to ``(lo, hi)``.

    Inverse-CDF sampling.  Intervals lying entirely above the mean are
    reflected so the CDF is always evaluated in the lower tail, where it keeps
    full relative precision; intervals too deep for double precision switch
    to log-scale CDFs, so draws 30+ standard deviations out stay finite and
    inside the interval.
    """
    mean, sd, lo, hi = np.broadcast_arrays(*(np.asarray(v, dtype=float)
                                             for v in (mean, sd, lo, hi)))
    shape = mean.shape
    mean, sd, lo, hi = (v.reshape(-1) for v in (mean, sd, lo, hi))
    a = (lo - mean) / sd
    b = (hi - mean) / sd
    if np.any(~(a < b)):
        raise IntervalError("truncation interval must satisfy lo < hi")
    flip = a > 0
    a, b = np.where(flip, -b, a), np.where(flip, -a, b)
    u = rng.random(a.shape)
    pa, pb = ndtr(a), ndtr(b)
    z = ndtri(pa + u * (pb - pa))
    deep = pb < _LOG_PATH_BELOW
    if np.any(deep):
        la, lb, ud = log_ndtr(a[deep]), log_ndtr(b[deep]), u[deep]
        with np.errstate(divide="ignore"):
            z[deep] = ndtri_exp(np.logaddexp(np.log1p(-ud) + la, np.log(ud) + lb))
    z = np.clip(z, np.nextafter(a, np.inf), np.nextafter(b, -np.inf))
    z = np.where(flip, -z, z)
    return (mean + sd * z).reshape(shape)


def truncated_normal_sample(mean: float, sd: float, lo: float = -np.inf,
                            hi: float = np.inf, rng=None) -> float:
    """One draw from ``N(mean, sd**2)`` conditioned on ``lo < x < hi``."""
    if not lo < hi:
        raise IntervalError(f"empty interval ({lo}, {hi})")
    if sd <= 0:
        raise ValidationError("sd must be positive")
    rng = np.random.default_rng(rng)
    return float(truncnorm_draw(mean, sd, lo, hi, rng))


# -- Gibbs E-step ----------------------------------------------------------

def _parity_bounds(X: np.ndarray, start: int):
    n, m = X.shape
    cols = np.arange(start, m, 2)
    hi = np.full((n, cols.size), np.inf)
    lo = np.full((n, cols.size), -np.inf)
    above = cols - 1
    below = cols + 1
    ok = above >= 0
    hi[:, ok] = X[:, above[ok]]
    ok = below < m
    lo[:, ok] = X[:, below[ok]]
    return cols, lo, hi


def _gibbs(X, mu_pos, sd_pos, burn_in, sweeps, rng, keep=False, check=False):
    """Run Gibbs sweeps in place on position-ordered latent utilities ``X``.

    Positions of equal parity are conditionally independent given the rest,
    so each sweep is two block updates.  Returns the sums of ``X`` and
    ``X**2`` over the retained sweeps and, with ``keep``, the states.
    """
    s1 = np.zeros_like(X)
    s2 = np.zeros_like(X)
    states = [] if keep else None
    for sweep in range(burn_in + sweeps):
        for start in (0, 1):
            cols, lo, hi = _parity_bounds(X, start)
            X[:, cols] = truncnorm_draw(mu_pos[:, cols], sd_pos[:, cols], lo, hi, rng)
        if check and not np.all(X[:, :-1] > X[:, 1:]):
            raise AssertionError("Gibbs state violates the ranking order")
        if sweep >= burn_in:
            s1 += X
            s2 += X * X
            if keep:
                states.append(X.copy())
    return s1, s2, states


def _initial_state(n: int, m: int) -> np.ndarray:
    return np.tile((m - 1) / 2.0 - np.arange(m, dtype=float), (n, 1))


def gibbs_chain(ranking: Sequence[int], params: NormalRUMParams, cfg: MCEMConfig,
                rng=None) -> np.ndarray:
    """Retained Gibbs states for one ranking, as utilities indexed by alternative.

    Returns an array of shape ``(cfg.gibbs_samples, m)``.
    """
    r = np.asarray(as_ranking(ranking, params.m))
    rng = np.random.default_rng(rng)
    X = _initial_state(1, params.m)
    _, _, states = _gibbs(X, params.means[r][None, :], params.sds[r][None, :],
                          cfg.burn_in, cfg.gibbs_samples, rng, keep=True, check=True)
    out = np.empty((len(states), params.m))
    out[:, r] = np.vstack(states)
    return out


def gibbs_estep(ranking: Sequence[int], params: NormalRUMParams, cfg: MCEMConfig,
                rng=None) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo estimates of ``E[x_j]`` and ``E[x_j**2]`` given the ranking."""
    states = gibbs_chain(ranking, params, cfg, rng)
    return states.mean(axis=0), (states ** 2).mean(axis=0)


# -- MC-EM -----------------------------------------------------------------

def _initial_params(data: Dataset, reference: int) -> NormalRUMParams:
    win = data.beats.sum(axis=1) / (data.n * max(data.m - 1, 1))
    win = np.clip(win, 0.02, 0.98)
    return NormalRUMParams(np.sqrt(2.0) * ndtri(win), np.ones(data.m), reference)


def fit_normal_mcem(data: Dataset, cfg: MCEMConfig | None = None, callback=None,
                    init: NormalRUMParams | None = None) -> NormalRUMParams:
    """Fit means and standard deviations by Monte Carlo EM.

    One Gibbs chain per ranking is kept across EM iterations (warm start).
    After each M-step all parameters and chain states are mapped by the
    affine transform that pins ``cfg.reference`` to N(0, 1).
    ``callback(iteration, params)`` is called after every M-step.
    """
    cfg = cfg or MCEMConfig()
    if data.n < 2:
        raise ValidationError("MC-EM needs at least two rankings")
    if not 0 <= cfg.reference < data.m:
        raise ValidationError(f"reference {cfg.reference} out of range for m={data.m}")
    rng = np.random.default_rng(cfg.seed)
    orders = data.orders
    n, m = orders.shape
    params = init.repin(cfg.reference) if init is not None else _initial_params(data, cfg.reference)
    X = _initial_state(n, m)
    floored = set()
    for it in range(cfg.max_em_iters):
        sweeps = cfg.samples_at(it)
        s1, s2, _ = _gibbs(X, params.means[orders], params.sds[orders],
                           cfg.burn_in, sweeps, rng)
        total = n * sweeps
        ex = np.bincount(orders.ravel(), weights=s1.ravel(), minlength=m) / total
        ex2 = np.bincount(orders.ravel(), weights=s2.ravel(), minlength=m) / total
        var = ex2 - ex ** 2
        low = var < cfg.sd_floor ** 2
        if low.any():
            floored.update(int(j) for j in np.flatnonzero(low))
            warnings.warn(f"standard deviation floored for alternatives {sorted(floored)}",
                          DegenerateLikelihoodWarning, stacklevel=2)
        sd = np.sqrt(np.maximum(var, cfg.sd_floor ** 2))
        shift, scale = ex[cfg.reference], sd[cfg.reference]
        X = (X - shift) / scale
        new = NormalRUMParams(ex, sd, cfg.reference, tuple(sorted(floored)))
        change = max(
            np.max(np.abs(new.means - params.means) / np.maximum(np.abs(params.means), 1.0)),
            np.max(np.abs(new.sds - params.sds) / np.maximum(params.sds, 1.0)))
        params = new
        if callback is not None:
            callback(it, params)
        if change < cfg.rel_tol:
            break
    return params


# -- model quantities ------------------------------------------------------

def normal_pairwise(params: NormalRUMParams) -> PairwiseMatrix:
    mu, sd = params.means, params.sds
    z = (mu[:, None] - mu[None, :]) / np.sqrt(sd[:, None] ** 2 + sd[None, :] ** 2)
    return PairwiseMatrix(ndtr(z))


def _ghk_logweights(orders: np.ndarray, params: NormalRUMParams, draws: int, rng):
    """Log importance weights, shape ``(len(orders), draws)``.

    The top alternative's utility is drawn from its marginal; each later one
    from its normal truncated above by the previous draw, with the truncation
    probability multiplied into the weight.
    """
    mu = params.means[orders][:, None, :]
    sd = params.sds[orders][:, None, :]
    k = orders.shape[0]
    x = mu[:, :, 0] + sd[:, :, 0] * rng.standard_normal((k, draws))
    logw = np.zeros((k, draws))
    for t in range(1, orders.shape[1]):
        mt, st = mu[:, :, t], sd[:, :, t]
        logw += log_ndtr((x - mt) / st)
        x = truncnorm_draw(mt, st, -np.inf, x, rng)
    return logw


def _summarise(logw: np.ndarray):
    d = logw.shape[-1]
    est = logsumexp(logw, axis=-1) - np.log(d)
    w = np.exp(logw - logw.max(axis=-1, keepdims=True))
    rel_sd = w.std(axis=-1, ddof=1) / w.mean(axis=-1)
    return est, rel_sd / np.sqrt(d)


def normal_ranking_loglik(ranking: Sequence[int], params: NormalRUMParams,
                          draws: int = 5000, seed=None) -> tuple[float, float]:
    """Importance-sampling estimate of ``log P(ranking)`` and its standard error."""
    if draws < 100:
        raise ValidationError("draws must be >= 100")
    r = np.asarray(as_ranking(ranking, params.m))[None, :]
    rng = np.random.default_rng(seed)
    est, se = _summarise(_ghk_logweights(r, params, draws, rng))
    return float(est[0]), float(se[0])


def normal_nll(data: Dataset, params: NormalRUMParams, draws: int = 5000,
               seed=None, chunk: int = 64) -> tuple[float, float]:
    """Monte Carlo negative log-likelihood of ``data`` and its standard error.

    Identical rankings share one estimate.  Standard errors of the
    per-ranking log-likelihoods are combined as independent.
    """
    if params.m != data.m:
        raise DimensionError(f"params for m={params.m}, data has m={data.m}")
    if draws < 100:
        raise ValidationError("draws must be >= 100")
    uniq, counts = np.unique(data.orders, axis=0, return_counts=True)
    rng = np.random.default_rng(seed)
    nll = 0.0
    var = 0.0
    for start in range(0, uniq.shape[0], chunk):
        block = uniq[start:start + chunk]
        c = counts[start:start + chunk]
        est, se = _summarise(_ghk_logweights(block, params, draws, rng))
        nll -= float((c * est).sum())
        var += float((c ** 2 * se ** 2).sum())
    return nll, float(np.sqrt(var))


def sample_normal_rum(params: NormalRUMParams, count: int, seed=None) -> np.ndarray:
    """Rankings obtained by sorting independent utility draws, best first."""
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = np.random.default_rng(seed)
    x = params.means + params.sds * rng.standard_normal((count, params.m))
    return np.argsort(-x, axis=1, kind="stable")
