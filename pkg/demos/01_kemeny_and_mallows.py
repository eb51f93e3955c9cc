"""Consensus rankings and the Mallows model on a small voting example.

Draw rankings of six candidates around a known consensus, recover the
consensus with the exact Kemeny search, and check the fitted dispersion and
the closed-form pairwise probabilities against a simulation.
"""
import numpy as np

from rankagg import (Dataset, MallowsParams, empirical_pairwise, fit_mallows, kemeny_rank,
                     kendall_tau, kendall_tau_to_all, mallows_pairwise, sample_mallows)

labels = ("ada", "bo", "cy", "dee", "eli", "fay")
truth = MallowsParams.from_phi((2, 0, 5, 1, 4, 3), phi=0.55)
orders = sample_mallows(truth, 400, seed=7)
data = Dataset(orders, labels)

print("first five ballots:")
for r in data.rankings[:5]:
    print("   ", " > ".join(labels[j] for j in r))

# Kendall tau counts discordant pairs; the reversed ranking is maximally far
print("tau(truth, reversed) =", kendall_tau(truth.reference, truth.reference[::-1]))

consensus = kemeny_rank(data)
d = kendall_tau_to_all(data, consensus)
print("\nKemeny consensus:", " > ".join(labels[j] for j in consensus))
print("true reference:  ", " > ".join(labels[j] for j in truth.reference))
print(f"mean distance to consensus {d.mean():.3f}")

fit = fit_mallows(data)
print(f"\nfitted phi = {fit.phi:.3f} (true {truth.phi:.3f}), p = {fit.p:.3f}")

# the pairwise probability only depends on how far apart two items sit in the
# reference, so the matrix is constant along diagonals in reference order
model = mallows_pairwise(fit).permute(fit.reference)
np.set_printoptions(precision=3, suppress=True)
print("\nmodel P(row beats col), reference order\n", model.p)

big = Dataset(sample_mallows(fit, 100_000, seed=1), labels)
sim = empirical_pairwise(big).permute(fit.reference)
print("largest gap to 1e5 simulated rankings:", np.abs(sim.p - model.p).max().round(4))
