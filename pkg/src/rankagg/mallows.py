"""Mallows model: Kemeny consensus, dispersion fit, likelihood, sampling.

The distribution over full rankings is ``P(s) = phi**d(s, ref) / Z_m(phi)``
where ``d`` is the Kendall tau distance and ``phi = (1 - p) / p`` for the
agreement probability ``p`` in (0.5, 1].
"""

from __future__ import annotations

import sys
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .core import Dataset, PairwiseMatrix, Ranking, as_ranking, kendall_tau_to_all
from .errors import CapacityError, DegenerateLikelihoodWarning, DimensionError, ValidationError

EXACT_KEMENY_MAX_M = 16
PHI_MAX = 1.0 - 1e-9


@dataclass(frozen=True)
class MallowsParams:
    """Reference ranking and agreement probability ``p``.

    ``clamped`` is set when the dispersion estimate ran into the ``phi -> 1``
    boundary (data at least as dispersed as the uniform distribution).
    """

    reference: Ranking
    p: float
    clamped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "reference", as_ranking(self.reference))
        if not 0.5 < self.p <= 1.0:
            raise ValidationError(f"p must lie in (0.5, 1], got {self.p}")

    @classmethod
    def from_phi(cls, reference, phi, clamped=False) -> "MallowsParams":
        if not 0.0 <= phi < 1.0:
            raise ValidationError(f"phi must lie in [0, 1), got {phi}")
        return cls(reference, 1.0 / (1.0 + phi), clamped)

    @property
    def phi(self) -> float:
        return (1.0 - self.p) / self.p

    @property
    def m(self) -> int:
        return len(self.reference)


def log_partition(m: int, phi: float) -> float:
    """``log Z_m(phi) = sum_i log(1 + phi + ... + phi**(i-1))``."""
    partial = np.cumsum(phi ** np.arange(m, dtype=float))
    return float(np.log(partial).sum())


def expected_distance(m: int, phi: float) -> float:
    """Mean Kendall tau distance to the reference under ``Mallows(phi)``."""
    z = np.arange(m, dtype=float)
    powers = phi ** z
    return float((np.cumsum(z * powers) / np.cumsum(powers)).sum())


# -- Kemeny consensus ------------------------------------------------------

def kemeny_cost(data: Dataset, ranking: Sequence[int]) -> int:
    """Total Kendall tau distance from ``ranking`` to every ranking in ``data``."""
    r = list(as_ranking(ranking, data.m))
    c = data.beats[np.ix_(r, r)]
    return int(np.tril(c, -1).sum())


def _kemeny_exact(beats: np.ndarray) -> Ranking:
    m = beats.shape[0]
    n_states = 1 << m
    # below[j, S]: disagreements from placing j directly under the set S.
    below = np.zeros((m, n_states), dtype=np.int64)
    for b in range(m):
        below[:, 1 << b: 2 << b] = below[:, : 1 << b] + beats[:, b: b + 1]

    states = np.arange(n_states)
    popcount = np.zeros(n_states, dtype=np.int64)
    for b in range(m):
        popcount += (states >> b) & 1
    big = np.iinfo(np.int64).max // 4
    # togo[S]: least cost of ordering the complement of S beneath S.
    togo = np.full(n_states, big, dtype=np.int64)
    togo[n_states - 1] = 0
    for k in range(m - 1, -1, -1):
        layer = states[popcount == k]
        best = np.full(layer.size, big, dtype=np.int64)
        for j in range(m):
            free = ((layer >> j) & 1) == 0
            s = layer[free]
            cand = below[j, s] + togo[s | (1 << j)]
            best[free] = np.minimum(best[free], cand)
        togo[layer] = best

    order = []
    s = 0
    for _ in range(m):
        for j in range(m):
            if not (s >> j) & 1 and below[j, s] + togo[s | (1 << j)] == togo[s]:
                order.append(j)
                s |= 1 << j
                break
    return tuple(order)


def _kemeny_local(beats: np.ndarray, positions: np.ndarray) -> Ranking:
    m = beats.shape[0]
    borda = positions.sum(axis=0)
    order = sorted(range(m), key=lambda j: (borda[j], j))
    improved = True
    while improved:
        improved = False
        for t in range(m - 1):
            a, b = order[t], order[t + 1]
            if beats[a, b] < beats[b, a]:
                order[t], order[t + 1] = b, a
                improved = True
    return tuple(order)


def kemeny_rank(data: Dataset, method: str = "auto") -> Ranking:
    """Ranking minimising the total Kendall tau distance to ``data``.

    Parameters
    ----------
    method : {"auto", "exact", "local-search"}
        ``exact`` runs a dynamic program over subsets of alternatives
        (``O(m 2**m)``) and is limited to ``m <= 16``.  ``local-search``
        starts from the Borda ordering and applies improving adjacent swaps.
        ``auto`` picks ``exact`` whenever it is feasible.

    Ties between optimal rankings go to the lexicographically smallest one.
    """
    if method == "auto":
        method = "exact" if data.m <= EXACT_KEMENY_MAX_M else "local-search"
    if method == "exact":
        if data.m > EXACT_KEMENY_MAX_M:
            raise CapacityError(
                f"exact Kemeny is limited to m <= {EXACT_KEMENY_MAX_M} (got {data.m}); "
                "use method='local-search'")
        return _kemeny_exact(data.beats)
    if method == "local-search":
        return _kemeny_local(data.beats, data.positions)
    raise ValueError(f"unknown Kemeny method {method!r}")


# -- estimation and likelihood ---------------------------------------------

def fit_phi(data: Dataset, reference: Sequence[int]) -> MallowsParams:
    """Maximum-likelihood dispersion given a fixed reference ranking.

    The score equation ``E_phi[d] = mean observed distance`` has a unique root
    because the expected distance increases with ``phi``.  Data at least as
    dispersed as the uniform distribution gets ``phi`` clamped just below 1
    and ``clamped=True``.
    """
    ref = as_ranking(reference, data.m)
    dbar = float(kendall_tau_to_all(data, ref).mean())
    m = data.m
    if dbar == 0.0:
        return MallowsParams(ref, 1.0)

    def score(phi):
        return expected_distance(m, phi) - dbar

    if score(PHI_MAX) <= 0.0:
        warnings.warn(
            f"mean distance {dbar:.4g} reaches the uniform limit {m * (m - 1) / 4:.4g}; "
            "clamping phi to the boundary", DegenerateLikelihoodWarning, stacklevel=2)
        return MallowsParams.from_phi(ref, PHI_MAX, clamped=True)
    phi = brentq(score, 0.0, PHI_MAX, xtol=1e-15, rtol=1e-12)
    return MallowsParams.from_phi(ref, phi)


def fit_mallows(data: Dataset, method: str = "auto") -> MallowsParams:
    """Kemeny reference ranking followed by the dispersion MLE."""
    return fit_phi(data, kemeny_rank(data, method))


def mallows_nll(data: Dataset, params: MallowsParams) -> float:
    """Exact negative log-likelihood of ``data``.

    With ``phi == 0`` any ranking other than the reference has probability
    zero; the result is then ``sys.float_info.max`` with a warning.
    """
    if params.m != data.m:
        raise DimensionError(f"params for m={params.m}, data has m={data.m}")
    d = kendall_tau_to_all(data, params.reference)
    phi = params.phi
    if phi == 0.0:
        if d.any():
            warnings.warn("data contains rankings impossible under phi=0",
                          DegenerateLikelihoodWarning, stacklevel=2)
            return sys.float_info.max
        return 0.0
    return float(data.n * log_partition(data.m, phi) - d.sum() * np.log(phi))


def pairwise_by_distance(phi: float, c) -> np.ndarray:
    """Probability that an alternative ``c`` places above another in the
    reference ranking is still ranked above it."""
    c = np.atleast_1d(np.asarray(c, dtype=np.int64))
    if c.size and c.min() < 1:
        raise ValueError("position gap c must be >= 1")
    out = np.empty(c.shape, dtype=float)
    for idx, cc in np.ndenumerate(c):
        z = np.arange(1, cc + 1, dtype=float)
        num = (z * phi ** (z - 1)).sum()
        den = (phi ** (z - 1)).sum() * (phi ** np.arange(cc + 1, dtype=float)).sum()
        out[idx] = num / den
    return out


def mallows_pairwise(params: MallowsParams) -> PairwiseMatrix:
    m = params.m
    ref = np.asarray(params.reference)
    probs = pairwise_by_distance(params.phi, np.arange(1, m))
    k, l = np.triu_indices(m, 1)
    p = np.full((m, m), 0.5)
    p[ref[k], ref[l]] = probs[l - k - 1]
    p[ref[l], ref[k]] = 1.0 - probs[l - k - 1]
    return PairwiseMatrix(p)


# -- sampling --------------------------------------------------------------

def sample_mallows(params: MallowsParams, count: int, seed=None) -> np.ndarray:
    """Draw ``count`` rankings by repeated insertion.

    Alternatives are inserted in reference order; the ``i``-th one jumps
    ahead of ``v`` of the ``i`` already placed with probability proportional
    to ``phi**v``.  Returns an ``(count, m)`` array of orders.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = np.random.default_rng(seed)
    m, phi = params.m, params.phi
    ref = np.asarray(params.reference)
    pos = np.zeros((count, m), dtype=np.int64)
    for i in range(1, m):
        w = phi ** np.arange(i + 1, dtype=float)
        cdf = np.cumsum(w / w.sum())
        cdf[-1] = 1.0
        jumps = np.searchsorted(cdf, rng.random(count), side="right")
        slot = i - jumps
        placed = pos[:, :i]
        placed += placed >= slot[:, None]
        pos[:, i] = slot
    orders = np.empty_like(pos)
    np.put_along_axis(orders, pos, np.broadcast_to(ref, pos.shape), axis=1)
    return orders


def sample_mallows_rejection(params: MallowsParams, count: int, seed=None,
                             batch: int = 4096) -> np.ndarray:
    """Sample by orienting every pair independently and keeping acyclic results.

    Each pair agrees with the reference with probability ``p``; the draw is
    kept only when the resulting tournament is a total order.  Exponentially
    slow in ``m``; intended as an independent check on :func:`sample_mallows`.
    """
    rng = np.random.default_rng(seed)
    m = params.m
    ref = np.asarray(params.reference)
    k, l = np.triu_indices(m, 1)
    target = np.arange(m)
    kept = []
    total = 0
    while total < count:
        agree = rng.random((batch, k.size)) < params.p
        wins = np.zeros((batch, m), dtype=np.int64)
        # position-space tournament: k beats l when the pair agrees
        np.add.at(wins, (np.arange(batch)[:, None], np.where(agree, k, l)), 1)
        ok = (np.sort(wins, axis=1) == target).all(axis=1)
        ranks = m - 1 - wins[ok]
        orders = np.empty_like(ranks)
        np.put_along_axis(orders, ranks, np.broadcast_to(ref, ranks.shape), axis=1)
        kept.append(orders)
        total += orders.shape[0]
    return np.vstack(kept)[:count] if kept else np.empty((0, m), dtype=np.int64)
