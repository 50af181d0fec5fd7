"""
Word of mouth on a scale-free network
=====================================

A random 30% of users share one interest, but they can only pass items to
their neighbours in the network. The item spreads through the member
component it starts in, and no further.
"""

import numpy as np

from sfnrec import ProtocolConfig, build_scenario, generate, theory
from sfnrec.protocols import measure_sig_connectivity, run_word_of_mouth, sig_components

params = theory.PowerLawParams.for_size(10_000, 1.6)
for seed in range(3):
    g = generate(params, seed)
    mu = g.node_count
    scenario = build_scenario(1, int(0.3 * mu), 1, 5, eta=10 ** 6, mu=mu, lambda_target=0.3, rng=seed)
    placement = np.random.default_rng([seed, 1]).permutation(mu)
    sig = scenario.sigs[0]

    largest, orphans, gamma = measure_sig_connectivity(g, sig, placement)
    start = int(sig_components(g, sig, placement)[0][0])

    # members alone cannot bridge gaps between components
    strict = run_word_of_mouth(scenario, g, placement, ProtocolConfig("word_of_mouth", seed=seed, max_rounds=100),
                               initial_items={start: 0})
    # uninterested users who forward now and then can
    relay = run_word_of_mouth(
        scenario, g, placement,
        ProtocolConfig("word_of_mouth", seed=seed, max_rounds=100, forward_prob_uninterested=0.5),
        initial_items={start: 0},
    )
    print(f"seed {seed}: largest member component {largest:.3f}, isolated members {orphans:.3f}, gamma {gamma:.2f}")
    print(f"  satisfied without relays {strict.satisfied_sig_fraction:.3f} in {strict.rounds} rounds")
    print(f"  satisfied with relays    {relay.satisfied_sig_fraction:.3f} in {relay.rounds} rounds, spam {relay.spam}")
