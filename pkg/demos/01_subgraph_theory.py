"""
Random subgraphs of a scale-free network
========================================

Fail a fraction p of nodes uniformly at random. The survivors still follow a
power law, only steeper. Once the slope passes about 3.48 the subgraph has
no giant component left.
"""

import numpy as np

from sfnrec import theory

# a graph of roughly 10^5 nodes with slope 2.5
params = theory.PowerLawParams.for_size(100_000, 2.5)
print(f"alpha = {params.alpha:.4f}, max degree = {params.max_degree()}")

# the slope of the surviving subgraph, and the share of survivors left isolated
for p in (0.0, 0.3, 0.6, 0.8):
    r = theory.subgraph_report(params, p)
    print(f"p = {p:.1f}: beta' = {r.beta_prime:.4f}, orphaned survivors = {r.orphan_fraction:.4f}")

# where the slope crosses the threshold
print(f"critical failure rate: {theory.critical_failure_rate(params):.4f}")

# steeper graphs break up much sooner
for beta in (2.1, 2.5, 3.0, 3.3):
    pc = theory.critical_failure_rate(theory.PowerLawParams.for_size(100_000, beta))
    print(f"beta = {beta}: p_c = {pc:.4f}")

# non-orphan survivors as a share of the original graph
grid = np.round(np.arange(0, 1.0001, 0.1), 10)
family = theory.curve_family([1.2, 1.6, 2.0, 2.5, 3.3], grid)
print("p    " + "  ".join(f"b={b:<4}" for b in family))
for i, p in enumerate(grid):
    print(f"{p:.1f}  " + "  ".join(f"{family[b][i][1]:.4f}" for b in family))
