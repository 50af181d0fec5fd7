import io
import math
from collections import Counter

import numpy as np
import pytest

from sfnrec.graph import Graph, generate, percolate_report
from sfnrec.protocols import (
    PlacementError,
    ProtocolConfig,
    measure_sig_connectivity,
    run_baseline,
    run_mailing_list,
    run_word_of_mouth,
    sig_components,
    write_message_log,
)
from sfnrec.scenario import SIGSpec, Scenario, build_scenario, reference_scenario
from sfnrec.theory import PowerLawParams

REF = reference_scenario(0)


def ml(seed=0, **kw):
    return ProtocolConfig("mailing_list", seed=seed, **kw)


def wom(seed=0, **kw):
    return ProtocolConfig("word_of_mouth", seed=seed, **kw)


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


class TestBaseline:
    def test_everything_liked(self):
        with pytest.warns(UserWarning):
            s = Scenario(3, 5, (SIGSpec({0, 1, 2}, range(5)),), [range(5)] * 3)
        m = run_baseline(s, ProtocolConfig("baseline", seed=1))
        assert m.rounds == 1 and m.satisfied_users == 3 and m.spam == 0 and m.messages == 0

    def test_single_agent_geometric(self, monkeypatch):
        # a lone agent has no SIG, which the coverage check forbids; skip it
        monkeypatch.setattr(Scenario, "validate", lambda self: None)
        s = Scenario(1, 100, (), [range(5)], lambda_target=1.0)
        rounds = [run_baseline(s, ProtocolConfig("baseline", seed=k)).rounds for k in range(1000)]
        q = 5 / 100
        # k-th sample happens in round 2k-1; samples ~ Geometric(q)
        expected = 2 / q - 1
        se = 2 * math.sqrt(1 - q) / q / math.sqrt(len(rounds))
        assert abs(np.mean(rounds) - expected) < 3 * se
        assert 2 * 100 / 5 == pytest.approx(np.mean(rounds), rel=0.1)

    def test_counters(self):
        m = run_baseline(REF, ProtocolConfig("baseline", seed=4), log=True)
        assert m.spam <= m.messages
        assert m.samples_recommended <= m.messages
        assert m.satisfied_users <= REF.mu
        assert m.completed
        # queries and replies alternate in the log
        assert len(m.log) == m.messages

    def test_deterministic(self):
        cfg = ProtocolConfig("baseline", seed=11)
        assert run_baseline(REF, cfg) == run_baseline(REF, cfg)


class TestMailingList:
    def test_reference_run(self):
        m = run_mailing_list(REF, ml(3), log=True)
        assert m.completed
        assert m.satisfied_sig_fraction == 1.0
        assert m.satisfied_users == REF.mu
        # a broadcast reaches at most the other 19 members
        assert m.messages <= 19 * m.broadcasts

    def test_no_idiosyncratic_items_no_spam(self):
        s = build_scenario(1, 20, 10, 0, eta=1000, mu=20, rng=0)
        for seed in range(20):
            m = run_mailing_list(s, ml(seed))
            assert m.spam == 0
            assert m.satisfied_sig_fraction == 1.0

    @pytest.mark.parametrize("seed", range(10))
    def test_log_recomputes_spam_and_memory(self, seed):
        s = build_scenario(2, [8, 12], [3, 5], 7, eta=300, mu=20, overlap=2, lambda_target=0.9, rng=seed)
        m = run_mailing_list(s, ml(seed), log=True)
        liked = sum(1 for r in m.log if r[4])
        assert m.spam == len(m.log) - liked
        assert m.messages == len(m.log)
        pairs = Counter((r[2], r[3]) for r in m.log)
        assert max(pairs.values()) == 1
        assert m.samples_recommended <= m.messages

    def test_satisfaction_monotone(self):
        m = run_mailing_list(REF, ml(7))
        assert np.all(np.diff(m.satisfied_by_round) >= 0)

    def test_deterministic(self):
        assert run_mailing_list(REF, ml(5)) == run_mailing_list(REF, ml(5))

    def test_multi_sig_broadcast_reaches_union(self):
        s = build_scenario(2, 4, 2, 2, eta=60, mu=7, overlap=1, rng=0)
        m = run_mailing_list(s, ml(2), log=True)
        shared = next(iter(s.sigs[0].members & s.sigs[1].members))
        sent = {(r[2]) for r in m.log if r[1] == shared}
        if sent:
            assert sent <= (s.sigs[0].members | s.sigs[1].members) - {shared}

    def test_message_log_csv(self):
        m = run_mailing_list(REF, ml(1), log=True)
        buf = io.StringIO()
        write_message_log(m, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "round,sender,receiver,item,liked"
        assert len(lines) == m.messages + 1

    def test_unlogged_run_cannot_dump(self):
        with pytest.raises(ValueError):
            write_message_log(run_mailing_list(REF, ml(1)), io.StringIO())


class TestWordOfMouth:
    def _homogeneous(self, n):
        # everyone likes one item; a huge catalog keeps random hits negligible
        return Scenario(n, 10 ** 7, (SIGSpec(range(n), {0}),), [{0}] * n)

    def test_flood_within_diameter(self):
        s = self._homogeneous(6)
        g = path_graph(6)
        m = run_word_of_mouth(s, g, np.arange(6), wom(max_rounds=50), initial_items={0: 0}, log=True)
        assert m.satisfied_sig_fraction == 1.0
        assert m.rounds <= 5
        assert m.spam == 0

    def test_split_sig_needs_forwarders(self):
        s = Scenario(3, 10 ** 7, (SIGSpec({0, 2}, {0}),), [{0}, {1}, {0}], lambda_target=2 / 3)
        g = path_graph(3)
        m = run_word_of_mouth(s, g, np.arange(3), wom(max_rounds=20), initial_items={0: 0}, log=True)
        assert not any(r[2] == 2 and r[3] == 0 for r in m.log)
        m = run_word_of_mouth(
            s, g, np.arange(3), wom(max_rounds=20, forward_prob_uninterested=1.0), initial_items={0: 0}, log=True
        )
        assert any(r[2] == 2 and r[3] == 0 for r in m.log)
        assert m.satisfied_sig_fraction == 1.0

    def test_placement_errors(self):
        s = self._homogeneous(4)
        g = path_graph(4)
        with pytest.raises(PlacementError):
            run_word_of_mouth(s, g, [0, 0, 1, 2], wom())
        with pytest.raises(PlacementError):
            run_word_of_mouth(s, g, [0, 1, 2], wom())
        dead = g.with_alive([True, True, True, False])
        with pytest.raises(PlacementError):
            run_word_of_mouth(s, dead, [0, 1, 2, 3], wom())

    @pytest.mark.parametrize("seed", range(5))
    def test_edge_dedup_and_memory(self, seed):
        params = PowerLawParams.for_size(300, 1.8)
        g = generate(params, seed)
        s = build_scenario(2, [60, 60], [2, 3], 4, eta=400, mu=g.node_count, lambda_target=0.3, rng=seed)
        placement = np.random.default_rng(seed).permutation(g.node_count)
        m = run_word_of_mouth(s, g, placement, wom(seed, max_rounds=200, forward_prob_uninterested=0.1), log=True)
        per_dir = Counter((r[1], r[2], r[3]) for r in m.log)
        assert max(per_dir.values()) == 1
        assert m.spam == sum(1 for r in m.log if not r[4])
        assert m.samples_recommended <= m.messages
        assert np.all(np.diff(m.satisfied_by_round) >= 0)

    def test_deterministic(self):
        g = generate(PowerLawParams.for_size(300, 1.8), 1)
        s = build_scenario(1, 90, 2, 3, eta=500, mu=g.node_count, lambda_target=0.3, rng=1)
        pl = np.arange(g.node_count)
        assert run_word_of_mouth(s, g, pl, wom(3, max_rounds=100)) == run_word_of_mouth(s, g, pl, wom(3, max_rounds=100))


class TestConnectivity:
    def test_clique_component(self):
        g = Graph(7, [(i, j) for i in range(4) for j in range(i + 1, 4)] + [(4, 5), (5, 6)])
        sig = SIGSpec(range(4), {0})
        assert measure_sig_connectivity(g, sig, np.arange(7)) == (1.0, 0.0, 0.0)

    def test_two_separated_members(self):
        g = path_graph(3)
        largest, orphans, gamma = measure_sig_connectivity(g, SIGSpec({0, 2}, {0}), np.arange(3))
        assert largest == 0.5
        assert orphans == 1.0
        assert gamma == 0.5

    def test_components_listing(self):
        g = path_graph(5)
        comps = sig_components(g, SIGSpec({0, 1, 3, 4}, {0}), np.arange(5))
        assert [c.tolist() for c in comps] == [[0, 1], [3, 4]]

    @pytest.mark.slow
    def test_random_sig_matches_percolation(self):
        params = PowerLawParams.for_size(100_000, 2.5)
        sig_share, perc_share, sig_orph, perc_orph = [], [], [], []
        for seed in range(10):
            g = generate(params, seed)
            rng = np.random.default_rng([seed, 5])
            members = rng.choice(g.node_count, size=int(0.4 * g.node_count), replace=False)
            largest, orphans, _ = measure_sig_connectivity(g, SIGSpec(members, {0}), np.arange(g.node_count))
            r = percolate_report(g, 0.6, rng)
            sig_share.append(largest)
            perc_share.append(r.largest_fraction_of_survivors)
            sig_orph.append(orphans)
            perc_orph.append(r.orphan_fraction)
        for a, b in ((sig_share, perc_share), (sig_orph, perc_orph)):
            se = math.sqrt((np.var(a, ddof=1) + np.var(b, ddof=1)) / len(a))
            assert abs(np.mean(a) - np.mean(b)) < 4 * se + 1e-3
