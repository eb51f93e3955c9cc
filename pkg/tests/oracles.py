"""Independent reference computations used as test oracles.

Everything here is brute force (enumeration over all m! orders, naive
Monte Carlo, explicit loops) and shares no code with the package beyond
plain data containers.
"""

import itertools
import math

import numpy as np


def tau_bruteforce(r1, r2):
    pos1 = {a: i for i, a in enumerate(r1)}
    pos2 = {a: i for i, a in enumerate(r2)}
    return sum(1 for a, b in itertools.combinations(r1, 2)
               if (pos1[a] - pos1[b]) * (pos2[a] - pos2[b]) < 0)


def kemeny_bruteforce(rankings, m):
    """All minimisers of total Kendall distance, in lexicographic order, and the cost."""
    best, winners = None, []
    for perm in itertools.permutations(range(m)):
        cost = sum(tau_bruteforce(perm, r) for r in rankings)
        if best is None or cost < best:
            best, winners = cost, [perm]
        elif cost == best:
            winners.append(perm)
    return winners, best


def mallows_distribution(reference, phi):
    """Exact probabilities ``phi**d / Z`` for every order, by enumeration."""
    m = len(reference)
    perms = list(itertools.permutations(range(m)))
    w = np.array([phi ** tau_bruteforce(p, reference) for p in perms], dtype=float)
    return perms, w / w.sum()


def pairwise_from_distribution(perms, probs, m):
    p = np.full((m, m), 0.5)
    for a in range(m):
        for b in range(m):
            if a != b:
                p[a, b] = sum(pr for perm, pr in zip(perms, probs)
                              if perm.index(a) < perm.index(b))
    return p


def pl_loglik_loop(ranking, gamma):
    remaining = list(range(len(gamma)))
    ll = 0.0
    for a in ranking:
        ll += math.log(gamma[a] / sum(gamma[k] for k in remaining))
        remaining.remove(a)
    return ll


def pl_distribution(gamma):
    m = len(gamma)
    perms = list(itertools.permutations(range(m)))
    probs = np.array([math.exp(pl_loglik_loop(p, gamma)) for p in perms])
    return perms, probs


def rum_frequency(ranking, means, sds, draws, seed):
    """Naive Monte Carlo: fraction of utility draws sorting into ``ranking``."""
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = 200_000
    done = 0
    while done < draws:
        k = min(chunk, draws - done)
        x = rng.normal(means, sds, size=(k, len(means)))
        order = np.argsort(-x, axis=1)
        hits += int((order == np.asarray(ranking)).all(axis=1).sum())
        done += k
    p = hits / draws
    return p, math.sqrt(p * (1 - p) / draws)


def empirical_pairwise_loop(orders, m):
    wins = np.zeros((m, m))
    for row in orders:
        for i, a in enumerate(row):
            for b in row[i + 1:]:
                wins[a, b] += 1
    p = wins / len(orders)
    np.fill_diagonal(p, 0.5)
    return p


def pairwise_zscores(orders, expected):
    """Standardised gaps between sample pairwise frequencies and ``expected``."""
    orders = np.asarray(orders)
    n, m = orders.shape
    pos = np.argsort(orders, axis=1)
    k, l = np.triu_indices(m, 1)
    freq = (pos[:, k] < pos[:, l]).mean(axis=0)
    exp = np.asarray(expected)[k, l]
    se = np.sqrt(np.maximum(exp * (1 - exp), 1e-12) / n)
    return (freq - exp) / se


def counts_by_order(orders, perms):
    index = {p: i for i, p in enumerate(perms)}
    counts = np.zeros(len(perms))
    for row in np.asarray(orders).tolist():
        counts[index[tuple(row)]] += 1
    return counts
