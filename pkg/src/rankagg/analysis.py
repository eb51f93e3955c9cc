"""Model diagnostics: predicted vs. empirical pairwise probabilities.

Fits any of the three models, lines the predicted pairwise comparison matrix
up against the empirical one in the model's modal ordering, and summarises
the fit with negative log-likelihoods, deviation statistics and the
probabilities of adjacent pairs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import singledispatch
from typing import Sequence

import numpy as np

from .core import Dataset, PairwiseMatrix, Ranking, as_ranking, empirical_pairwise
from .errors import DimensionError
from .mallows import MallowsParams, fit_mallows, mallows_nll, mallows_pairwise
from .normal_rum import (MCEMConfig, NormalRUMParams, fit_normal_mcem, normal_nll,
                         normal_pairwise, sample_normal_rum)
from .plackett_luce import PLParams, fit_pl_mm, pl_nll, pl_pairwise

MODELS = ("mallows", "pl", "normal")


def _descending(values: np.ndarray) -> Ranking:
    return tuple(int(j) for j in np.lexsort((np.arange(values.size), -values)))


@singledispatch
def modal_ordering(params, **kwargs) -> Ranking:
    """Most likely ordering of the alternatives under fitted ``params``.

    Mallows returns its reference ranking, Plackett-Luce sorts strengths.
    The Normal RUM sorts means by default; ``mode="monte-carlo"`` instead
    returns the most frequent of ``samples`` sampled rankings.  Ties go to
    the lower index.
    """
    raise TypeError(f"no modal ordering for {type(params).__name__}")


@modal_ordering.register
def _(params: MallowsParams, **kwargs) -> Ranking:
    return params.reference


@modal_ordering.register
def _(params: PLParams, **kwargs) -> Ranking:
    return _descending(params.strengths)


@modal_ordering.register
def _(params: NormalRUMParams, mode: str = "means", samples: int = 100_000,
      seed=0) -> Ranking:
    if mode == "means":
        return _descending(params.means)
    if mode != "monte-carlo":
        raise ValueError(f"unknown mode {mode!r}")
    counts = Counter(map(tuple, sample_normal_rum(params, samples, seed).tolist()))
    best = max(counts.values())
    return min(r for r, c in counts.items() if c == best)


@singledispatch
def model_pairwise(params) -> PairwiseMatrix:
    """Pairwise comparison matrix implied by fitted parameters."""
    raise TypeError(f"no pairwise matrix for {type(params).__name__}")


model_pairwise.register(MallowsParams, mallows_pairwise)
model_pairwise.register(PLParams, pl_pairwise)
model_pairwise.register(NormalRUMParams, normal_pairwise)


def model_name(params) -> str:
    return {MallowsParams: "mallows", PLParams: "pl", NormalRUMParams: "normal"}[type(params)]


def deviation_matrix(model_mat: PairwiseMatrix, empirical: PairwiseMatrix) -> np.ndarray:
    """Signed difference ``model - empirical``; antisymmetric, entries in [-1, 1]."""
    if model_mat.m != empirical.m:
        raise DimensionError(f"matrices of size {model_mat.m} and {empirical.m}")
    return model_mat.p - empirical.p


def deviation_summary(deviation: np.ndarray) -> tuple[float, float]:
    """Mean and max absolute deviation over distinct pairs."""
    upper = np.abs(deviation[np.triu_indices(deviation.shape[0], 1)])
    if upper.size == 0:
        return 0.0, 0.0
    return float(upper.mean()), float(upper.max())


def adjacent_pair_report(params, ordering: Sequence[int]) -> np.ndarray:
    """Model probability that each adjacent pair of ``ordering`` keeps its order."""
    mat = params if isinstance(params, PairwiseMatrix) else model_pairwise(params)
    order = as_ranking(ordering, mat.m)
    return np.array([mat.p[a, b] for a, b in zip(order[:-1], order[1:])])


@dataclass(frozen=True, eq=False)
class FitReport:
    """Everything the diagnostics need about one fitted model on one dataset.

    ``deviation`` is in the original alternative indexing; use
    :meth:`in_modal_order` for display.  ``nll_se`` is None for exact
    likelihoods.
    """

    model_name: str
    nll: float
    nll_se: float | None
    modal_ordering: Ranking
    pairwise: PairwiseMatrix
    empirical: PairwiseMatrix
    deviation: np.ndarray
    adjacent_probs: np.ndarray
    params: object
    display_ordering: Ranking = field(default=())

    def __post_init__(self):
        if not self.display_ordering:
            object.__setattr__(self, "display_ordering", self.modal_ordering)

    @property
    def mean_abs_deviation(self) -> float:
        return deviation_summary(self.deviation)[0]

    @property
    def max_abs_deviation(self) -> float:
        return deviation_summary(self.deviation)[1]

    def in_modal_order(self, which: str = "deviation") -> np.ndarray:
        idx = list(self.display_ordering)
        mat = {"deviation": self.deviation, "pairwise": self.pairwise.p,
               "empirical": self.empirical.p}[which]
        return mat[np.ix_(idx, idx)]

    def to_dict(self) -> dict:
        from .io import params_to_dict
        labels = self.pairwise.labels
        return {
            "model": self.model_name,
            "nll": self.nll,
            "nll_se": self.nll_se,
            "modal_ordering": [labels[j] for j in self.modal_ordering],
            "display_ordering": [labels[j] for j in self.display_ordering],
            "adjacent_probs": [float(x) for x in self.adjacent_probs],
            "mean_abs_deviation": self.mean_abs_deviation,
            "max_abs_deviation": self.max_abs_deviation,
            "pairwise": self.pairwise.p.tolist(),
            "empirical": self.empirical.p.tolist(),
            "deviation": self.deviation.tolist(),
            "params": params_to_dict(self.params, labels),
        }


def fit_model(data: Dataset, model: str, seed: int = 0, mcem: MCEMConfig | None = None,
              tol: float = 1e-9, kemeny: str = "auto", reference: int | None = None):
    """Fit one of ``"mallows"``, ``"pl"`` or ``"normal"`` and return its params."""
    if model == "mallows":
        return fit_mallows(data, kemeny)
    if model == "pl":
        return fit_pl_mm(data, tol=tol)
    if model == "normal":
        cfg = mcem or MCEMConfig()
        overrides = {"seed": seed}
        if reference is not None:
            overrides["reference"] = reference
        cfg = MCEMConfig(**{**cfg.__dict__, **overrides})
        return fit_normal_mcem(data, cfg)
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def model_nll(data: Dataset, params, draws: int = 5000, seed: int = 0):
    """Negative log-likelihood and its Monte Carlo standard error (None if exact)."""
    if isinstance(params, MallowsParams):
        return mallows_nll(data, params), None
    if isinstance(params, PLParams):
        return pl_nll(data, params), None
    if isinstance(params, NormalRUMParams):
        return normal_nll(data, params, draws=draws, seed=seed)
    raise TypeError(f"unsupported params {type(params).__name__}")


def build_report(data: Dataset, params, draws: int = 5000, seed: int = 0,
                 display_ordering: Sequence[int] | None = None) -> FitReport:
    """Assemble a :class:`FitReport` for already-fitted ``params``."""
    nll, se = model_nll(data, params, draws=draws, seed=seed + 1)
    modal = modal_ordering(params)
    display = as_ranking(display_ordering, data.m) if display_ordering is not None else modal
    predicted = model_pairwise(params)
    predicted = PairwiseMatrix(predicted.p, data.labels)
    empirical = empirical_pairwise(data)
    return FitReport(
        model_name=model_name(params), nll=nll, nll_se=se, modal_ordering=modal,
        pairwise=predicted, empirical=empirical,
        deviation=deviation_matrix(predicted, empirical),
        adjacent_probs=adjacent_pair_report(predicted, display),
        params=params, display_ordering=display)


def compare_models(data: Dataset, models: Sequence[str] = MODELS, seed: int = 0,
                   draws: int = 5000, mcem: MCEMConfig | None = None, tol: float = 1e-9,
                   reference: int | None = None) -> list[FitReport]:
    """Fit each requested model and report how well it matches the data."""
    if isinstance(models, str):
        models = MODELS if models == "all" else (models,)
    return [build_report(data, fit_model(data, name, seed=seed, mcem=mcem, tol=tol,
                                         reference=reference),
                         draws=draws, seed=seed)
            for name in models]


@dataclass(frozen=True, eq=False)
class SweepLevel:
    label: str
    data: Dataset
    report: FitReport


@dataclass(frozen=True, eq=False)
class DifficultySweep:
    """Fits per difficulty level; ``adjacent_prob_lines[k]`` holds the
    adjacent-pair probabilities of level ``k`` in display ordering."""

    levels: tuple[SweepLevel, ...]

    def __post_init__(self):
        ms = {lvl.data.m for lvl in self.levels}
        if len(ms) > 1:
            raise DimensionError(f"levels have different numbers of alternatives {sorted(ms)}")

    @property
    def labels(self) -> list[str]:
        return [lvl.label for lvl in self.levels]

    @property
    def adjacent_prob_lines(self) -> np.ndarray:
        return np.array([lvl.report.adjacent_probs for lvl in self.levels])


def difficulty_sweep(groups: Sequence[tuple[str, Dataset]], model: str = "normal",
                     seed: int = 0, truth: Sequence[int] | None = None,
                     draws: int = 5000, mcem: MCEMConfig | None = None,
                     tol: float = 1e-9) -> DifficultySweep:
    """Fit ``model`` separately to each labelled group of rankings.

    With a ground-truth ordering the adjacent probabilities are read along it
    and, for the Normal RUM, the truly best alternative is pinned to N(0, 1).
    Otherwise each level uses its own modal ordering.
    """
    if not groups:
        raise ValueError("difficulty_sweep needs at least one group")
    levels = []
    for k, (label, data) in enumerate(groups):
        ref = None if truth is None else int(truth[0])
        params = fit_model(data, model, seed=seed + k, mcem=mcem, tol=tol, reference=ref)
        report = build_report(data, params, draws=draws, seed=seed + k,
                              display_ordering=truth)
        levels.append(SweepLevel(str(label), data, report))
    return DifficultySweep(tuple(levels))
