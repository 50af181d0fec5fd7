"""
Checking the theory by percolation
==================================

Generate configuration-model graphs, fail nodes, and compare what survives
with the analytical predictions.
"""

import numpy as np

from sfnrec import graph, theory

params = theory.PowerLawParams.for_size(100_000, 2.5)
g = graph.generate(params, seed=0)
print(f"{g.node_count} nodes, {g.edge_count} edges, {g.self_loop_count()} self-loops")

# the unfailed degree histogram recovers the slope
print(f"fitted slope before failure: {graph.fit_power_law_slope(graph.degree_histogram(g)):.3f}")

# orphan share and fitted slope after failure, against theory
for p in (0.3, 0.6):
    r = graph.percolate_report(g, p, np.random.default_rng([0, 1]))
    print(
        f"p = {p}: orphans {r.orphan_fraction:.4f} (theory {theory.orphan_fraction(params, p):.4f}), "
        f"slope {r.fitted_beta:.3f} (theory {theory.beta_prime(params, p):.3f})"
    )

# how the largest component shrinks; it vanishes before the predicted 0.90
for p in np.round(np.arange(0.5, 0.95, 0.05), 2):
    r = graph.percolate_report(g, p, np.random.default_rng([0, 2]))
    print(f"p = {p:.2f}: largest component holds {r.largest_fraction_of_survivors:.4f} of survivors")
