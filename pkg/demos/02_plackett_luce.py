"""Plackett-Luce strengths by minorise-maximise.

The MM iteration never increases the negative log-likelihood, which we watch
step by step before comparing the fitted strengths to the truth.
"""
import numpy as np

from rankagg import Dataset, PLParams, fit_pl_mm, pl_nll, pl_pairwise, sample_pl
from rankagg.plackett_luce import pl_mm_steps

true = PLParams([0.35, 0.25, 0.18, 0.12, 0.07, 0.03])
data = Dataset(sample_pl(true, 3000, seed=11), tuple("ABCDEF"))

prev = np.inf
for k, params in enumerate(pl_mm_steps(data)):
    nll = pl_nll(data, params)
    if k < 6 or k % 10 == 0:
        print(f"iter {k:3d}  nll {nll:.6f}  drop {prev - nll:.2e}")
    prev = nll
    if k == 20:
        break

fit = fit_pl_mm(data)
print("\nstrengths fitted:", np.round(fit.strengths, 4))
print("strengths true:  ", np.round(true.strengths, 4))
print("max abs error:", np.abs(fit.strengths - true.strengths).max().round(4))

# Bradley-Terry pairwise probabilities; with items sorted by strength, rows
# rise to the right and columns fall downward
order = np.argsort(-fit.strengths)
print("\nP(row beats col), strongest first\n", np.round(pl_pairwise(fit).permute(order).p, 3))

# an item that is always ranked last has no finite maximum likelihood strength
stuck = Dataset.from_rankings([(0, 1, 2), (1, 0, 2)], labels=("x", "y", "z"))
try:
    fit_pl_mm(stuck)
except Exception as exc:
    print(f"\n{type(exc).__name__}: {exc}")
