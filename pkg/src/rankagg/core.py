"""Rankings, datasets, Kendall tau distance and pairwise comparison matrices.

A ranking is a sequence of alternative indices with the most preferred
alternative first.  Datasets store their rankings as an ``(n, m)`` integer
array so the estimators can work on whole datasets at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DimensionError, EmptyInputError, ValidationError

Ranking = tuple[int, ...]

COMPLEMENT_TOL = 1e-9


def as_ranking(order: Sequence[int], m: int | None = None) -> Ranking:
    """Validate ``order`` as a full ranking and return it as a tuple."""
    r = tuple(int(x) for x in order)
    if m is None:
        m = len(r)
    if len(r) != m:
        raise DimensionError(f"ranking has length {len(r)}, expected {m}")
    if sorted(r) != list(range(m)):
        raise DimensionError(f"{list(r)} is not a permutation of 0..{m - 1}")
    return r


def inverse_permutation(order: Sequence[int]) -> Ranking:
    inv = np.empty(len(order), dtype=np.int64)
    inv[np.asarray(order, dtype=np.int64)] = np.arange(len(order))
    return tuple(int(x) for x in inv)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """A bag of full rankings over a shared set of labelled alternatives.

    Parameters
    ----------
    orders : array_like, shape (n, m)
        ``orders[i, t]`` is the alternative at position ``t`` of ranking ``i``.
    labels : sequence of str, optional
        Display names; defaults to ``"0", "1", ...``.
    """

    orders: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        orders = np.asarray(self.orders)
        if orders.ndim != 2 or orders.shape[0] == 0:
            raise EmptyInputError("dataset must contain at least one ranking")
        if orders.dtype.kind not in "iu":
            raise ValidationError("ranking entries must be integers")
        n, m = orders.shape
        if m == 0:
            raise EmptyInputError("dataset must have at least one alternative")
        expected = np.arange(m)
        bad = np.flatnonzero(~(np.sort(orders, axis=1) == expected).all(axis=1))
        if bad.size:
            i = int(bad[0])
            raise ValidationError(
                f"ranking {i} ({orders[i].tolist()}) is not a permutation of 0..{m - 1}")
        labels = tuple(str(x) for x in self.labels) or tuple(str(j) for j in range(m))
        if len(labels) != m:
            raise DimensionError(f"{len(labels)} labels for {m} alternatives")
        if len(set(labels)) != m:
            raise ValidationError("alternative labels must be unique")
        object.__setattr__(self, "orders", _freeze(orders.astype(np.int64)))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_rankings(cls, rankings, labels=None) -> "Dataset":
        rows = [list(r) for r in rankings]
        if not rows:
            raise EmptyInputError("dataset must contain at least one ranking")
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise DimensionError(f"rankings of differing lengths {sorted(lengths)}")
        return cls(np.array(rows, dtype=np.int64), tuple(labels or ()))

    @property
    def n(self) -> int:
        return self.orders.shape[0]

    @property
    def m(self) -> int:
        return self.orders.shape[1]

    @property
    def rankings(self) -> list[Ranking]:
        return [tuple(int(x) for x in row) for row in self.orders]

    @cached_property
    def positions(self) -> np.ndarray:
        """``positions[i, j]`` is the position of alternative ``j`` in ranking ``i``."""
        pos = np.empty_like(self.orders)
        np.put_along_axis(pos, self.orders, np.arange(self.m)[None, :], axis=1)
        pos.setflags(write=False)
        return pos

    @cached_property
    def beats(self) -> np.ndarray:
        """``beats[j, k]`` counts rankings that place ``j`` above ``k``."""
        pos = self.positions
        return (pos[:, :, None] < pos[:, None, :]).sum(axis=0)

    def label_of(self, j: int) -> str:
        return self.labels[j]

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def concat(self, other: "Dataset") -> "Dataset":
        if other.labels != self.labels:
            raise DimensionError("datasets have different alternatives")
        return Dataset(np.vstack([self.orders, other.orders]), self.labels)

    def __len__(self):
        return self.n


@dataclass(frozen=True, eq=False)
class PairwiseMatrix:
    """Marginal probabilities ``p[j, k]`` that alternative ``j`` beats ``k``.

    The diagonal is fixed at 0.5 and ``p[j, k] + p[k, j] == 1`` off it.
    """

    p: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionError(f"pairwise matrix must be square, got {p.shape}")
        if np.any(~np.isfinite(p)) or p.min(initial=0.0) < 0.0 or p.max(initial=0.0) > 1.0:
            raise ValidationError("pairwise probabilities must lie in [0, 1]")
        np.fill_diagonal(p, 0.5)
        err = np.abs(p + p.T - 1.0).max(initial=0.0)
        if err > COMPLEMENT_TOL:
            raise ValidationError(f"p[j,k] + p[k,j] deviates from 1 by {err:.3g}")
        labels = tuple(self.labels) or tuple(str(j) for j in range(p.shape[0]))
        if len(labels) != p.shape[0]:
            raise DimensionError(f"{len(labels)} labels for {p.shape[0]} alternatives")
        object.__setattr__(self, "p", _freeze(p))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_upper(cls, p: np.ndarray, labels=()) -> "PairwiseMatrix":
        """Build from the strict upper triangle, filling the rest by complement."""
        p = np.asarray(p, dtype=float)
        upper = np.triu(p, 1)
        return cls(upper + np.tril(1.0 - upper.T, -1), labels)

    @property
    def m(self) -> int:
        return self.p.shape[0]

    def __getitem__(self, idx):
        return self.p[idx]

    def permute(self, order: Sequence[int]) -> "PairwiseMatrix":
        return permute_matrix(self, order)

    def upper_triangle(self) -> np.ndarray:
        return self.p[np.triu_indices(self.m, 1)]


def kendall_tau(r1: Sequence[int], r2: Sequence[int]) -> int:
    """Number of pairs of alternatives ordered differently by ``r1`` and ``r2``.

    >>> kendall_tau([0, 1, 2, 3], [3, 2, 1, 0])
    6
    """
    if len(r1) != len(r2):
        raise DimensionError(f"rankings of length {len(r1)} and {len(r2)}")
    a = np.asarray(as_ranking(r1), dtype=np.int64)
    b = np.asarray(as_ranking(r2), dtype=np.int64)
    m = a.size
    pos_b = np.empty(m, dtype=np.int64)
    pos_b[b] = np.arange(m)
    seq = pos_b[a]
    return int(np.triu(seq[:, None] > seq[None, :], 1).sum())


def kendall_tau_to_all(data: Dataset, reference: Sequence[int]) -> np.ndarray:
    """Kendall tau distance from every ranking of ``data`` to ``reference``."""
    ref = as_ranking(reference, data.m)
    seq = data.positions[:, list(ref)]
    iu = np.triu_indices(data.m, 1)
    return (seq[:, iu[0]] > seq[:, iu[1]]).sum(axis=1)


def empirical_pairwise(data: Dataset) -> PairwiseMatrix:
    """Fraction of rankings that place each alternative above each other one."""
    if data.n == 0:
        raise EmptyInputError("empty dataset")
    return PairwiseMatrix(data.beats / data.n, data.labels)


def permute_matrix(mat: PairwiseMatrix, order: Sequence[int]) -> PairwiseMatrix:
    """Reorder rows and columns so that row ``i`` is alternative ``order[i]``."""
    idx = list(as_ranking(order, mat.m))
    return PairwiseMatrix(mat.p[np.ix_(idx, idx)], tuple(mat.labels[i] for i in idx))
