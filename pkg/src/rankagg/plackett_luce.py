"""Plackett-Luce model fitted by minorization-maximization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .core import Dataset, PairwiseMatrix
from .errors import DegenerateDataError, DimensionError, NumericalError, ValidationError


@dataclass(frozen=True, eq=False)
class PLParams:
    """Positive strengths normalised to sum to one."""

    strengths: np.ndarray

    def __post_init__(self):
        g = np.array(self.strengths, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise DimensionError("strengths must be a non-empty vector")
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise ValidationError("strengths must be positive and finite")
        g /= g.sum()
        g.setflags(write=False)
        object.__setattr__(self, "strengths", g)

    @classmethod
    def from_means(cls, means) -> "PLParams":
        mu = np.asarray(means, dtype=float)
        return cls(np.exp(mu - mu.max()))

    @classmethod
    def uniform(cls, m: int) -> "PLParams":
        return cls(np.ones(m))

    @property
    def means(self) -> np.ndarray:
        return np.log(self.strengths)

    @property
    def m(self) -> int:
        return self.strengths.size


def check_connected(data: Dataset) -> None:
    """Raise :class:`DegenerateDataError` unless every alternative can reach
    every other one through the "ranked above" relation."""
    graph = data.beats > 0
    ncomp, label = connected_components(graph, directed=True, connection="strong")
    if ncomp == 1:
        return
    # A component that beats nothing outside itself pulls its strengths to 0.
    outside = label[None, :] != label[:, None]
    beats_out = np.zeros(ncomp, dtype=bool)
    for c in range(ncomp):
        members = label == c
        beats_out[c] = (graph & outside)[members].any()
    sink = int(np.flatnonzero(~beats_out)[0])
    names = [data.labels[j] for j in np.flatnonzero(label == sink)]
    raise DegenerateDataError(
        f"comparison graph is not strongly connected: alternative(s) {', '.join(names)} "
        "are never ranked above the remaining alternatives; the Plackett-Luce MLE does not exist")


def _stage_denominators(orders: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    # den[i, t] = total strength of the alternatives still unranked at stage t
    return np.cumsum(gamma[orders][:, ::-1], axis=1)[:, ::-1]


def pl_nll(data: Dataset, params: PLParams) -> float:
    """Exact negative log-likelihood."""
    if params.m != data.m:
        raise DimensionError(f"params for m={params.m}, data has m={data.m}")
    g = params.strengths
    den = _stage_denominators(data.orders, g)[:, :-1]
    chosen = g[data.orders[:, :-1]]
    return float(np.log(den).sum() - np.log(chosen).sum())


def pl_mm_steps(data: Dataset, init: PLParams | None = None):
    """Yield successive MM iterates (as :class:`PLParams`), starting with ``init``."""
    orders = data.orders
    n, m = orders.shape
    wins = np.bincount(orders[:, :-1].ravel(), minlength=m).astype(float)
    last = np.minimum(np.arange(m), m - 2)
    g = (init or PLParams.uniform(m)).strengths.copy()
    yield PLParams(g)
    while True:
        den = _stage_denominators(orders, g)[:, :-1]
        acc = np.cumsum(1.0 / den, axis=1)
        # alternative at position s sits in the remaining set for stages 0..min(s, m-2)
        per_slot = acc[:, last]
        denom = np.bincount(orders.ravel(), weights=per_slot.ravel(), minlength=m)
        g = wins / denom
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise NumericalError("MM update produced non-positive strengths")
        g /= g.sum()
        yield PLParams(g)


def fit_pl_mm(data: Dataset, tol: float = 1e-9, max_iter: int = 10000,
              callback=None) -> PLParams:
    """Maximum-likelihood strengths by Hunter's MM algorithm.

    Stops when the relative change in negative log-likelihood drops below
    ``tol`` or after ``max_iter`` updates.  ``callback(iteration, params, nll)``
    is invoked for the starting point and after every update.
    """
    if data.m < 2:
        return PLParams.uniform(data.m)
    check_connected(data)
    prev = None
    params = None
    for it, params in enumerate(pl_mm_steps(data)):
        nll = pl_nll(data, params)
        if callback is not None:
            callback(it, params, nll)
        if prev is not None and abs(prev - nll) <= tol * max(abs(nll), 1.0):
            break
        if it >= max_iter:
            break
        prev = nll
    return params


def pl_pairwise(params: PLParams) -> PairwiseMatrix:
    g = params.strengths
    return PairwiseMatrix(g[:, None] / (g[:, None] + g[None, :]))


def sample_pl(params: PLParams, count: int, seed=None) -> np.ndarray:
    """Draw rankings by repeated choice proportional to strength among the
    alternatives not yet placed.  Returns an ``(count, m)`` array of orders."""
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = np.random.default_rng(seed)
    m = params.m
    weights = np.tile(params.strengths, (count, 1))
    orders = np.empty((count, m), dtype=np.int64)
    rows = np.arange(count)
    for t in range(m - 1):
        cdf = np.cumsum(weights, axis=1)
        u = rng.random(count) * cdf[:, -1]
        # the first cdf entry above u has positive weight; the clip covers
        # u rounding up to cdf[-1]
        pick = (cdf <= u[:, None]).sum(axis=1)
        pick = np.minimum(pick, m - 1 - np.argmax(weights[:, ::-1] > 0, axis=1))
        orders[:, t] = pick
        weights[rows, pick] = 0.0
    if m:
        orders[:, m - 1] = np.argmax(weights > 0, axis=1)
    return orders
