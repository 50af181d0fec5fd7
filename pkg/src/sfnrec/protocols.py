"""
Synchronous-round simulators for three recommendation protocols
===============================================================

``run_baseline``
    Agents alternate between sampling the whole catalog (odd rounds) and
    asking a uniformly random agent for one of the items it has liked (even
    rounds). Spam is any request sent to an agent that is not yet satisfied.

``run_mailing_list``
    Each SIG is a clique. An agent that finds a liked item by sampling
    broadcasts it once to every member of every SIG it belongs to; recipients
    test it the next round and never rebroadcast. An agent keeps sampling
    until every one of its SIGs has seen a common item broadcast.

``run_word_of_mouth``
    Agents sit on the nodes of a graph. Whoever likes an item it tested sends
    it once over every incident edge the item has not already used; other
    recipients forward only with probability ``forward_prob_uninterested``.

In all three, a delivered item that is not among the recipient's interests
counts as spam in the two network models. Each (agent, item) pair is tested
at most once in the network models; the baseline samples with replacement.

An agent is satisfied once it has tested any item it likes. SIG satisfaction
(the ``satisfied_sig_fraction``) additionally requires an item from that
SIG's common set.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields
from typing import Mapping, Sequence

import numpy as np

from .graph import Graph, components
from .scenario import Scenario, SIGSpec

__all__ = [
    "ProtocolConfig",
    "SimMetrics",
    "PlacementError",
    "run_baseline",
    "run_mailing_list",
    "run_word_of_mouth",
    "run_protocol",
    "random_placement",
    "measure_sig_connectivity",
    "sig_components",
    "write_message_log",
]

PROTOCOLS = ("baseline", "mailing_list", "word_of_mouth")


class PlacementError(ValueError):
    """User-to-node placement is not a bijection onto the alive nodes."""


@dataclass(frozen=True)
class ProtocolConfig:
    kind: str = "mailing_list"
    forward_prob_uninterested: float = 0.0
    max_rounds: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.kind not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.kind!r}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if not 0.0 <= self.forward_prob_uninterested <= 1.0:
            raise ValueError("forward_prob_uninterested must lie in [0, 1]")


@dataclass
class SimMetrics:
    """Counters for one protocol run.

    ``trace_length`` is the length of the pooled random-sample sequence each
    SIG's members draw up to and including the first sample that lands in the
    SIG's common set, summed over SIGs (SIGs that never hit contribute all of
    their members' samples).
    """

    protocol: str
    seed: int
    samples_random: int = 0
    samples_recommended: int = 0
    messages: int = 0
    spam: int = 0
    broadcasts: int = 0
    satisfied_users: int = 0
    satisfied_sig_fraction: float = 0.0
    rounds: int = 0
    trace_length: int = 0
    completed: bool = False
    log: list = field(default=None, repr=False, compare=False)
    satisfied_by_round: list = field(default_factory=list, repr=False, compare=False)

    @property
    def total_samples(self) -> int:
        return self.samples_random + self.samples_recommended

    def as_row(self) -> dict:
        row = {f.name: getattr(self, f.name) for f in fields(self) if f.name in COLUMNS}
        row["total_samples"] = self.total_samples
        return row


COLUMNS = [f.name for f in fields(SimMetrics) if f.repr] + ["total_samples"]


class _State:
    """Per-run bookkeeping shared by the three engines."""

    def __init__(self, scenario: Scenario, protocol: str, seed: int, log: bool):
        self.s = scenario
        self.m = SimMetrics(protocol, seed, log=[] if log else None)
        self.member_of = scenario.memberships()
        self.tested = [set() for _ in range(scenario.mu)]
        self.satisfied = [False] * scenario.mu
        self.sig_sat = [{i: False for i in sigs} for sigs in self.member_of]
        self.sig_hit = [False] * scenario.ell
        self.rnd = 0

    def test(self, u: int, item: int, sampled: bool) -> bool:
        """Agent ``u`` tests ``item``; returns whether it is liked."""
        if sampled:
            self.m.samples_random += 1
            for i in self.member_of[u]:
                if not self.sig_hit[i]:
                    self.m.trace_length += 1
                    if item in self.s.sigs[i].common_items:
                        self.sig_hit[i] = True
        else:
            self.m.samples_recommended += 1
        return self.observe(u, item)

    def observe(self, u: int, item: int) -> bool:
        liked = item in self.s.user_interests[u]
        if liked:
            self.satisfied[u] = True
            for i in self.member_of[u]:
                if item in self.s.sigs[i].common_items:
                    self.sig_sat[u][i] = True
        return liked

    def deliver(self, sender: int, receiver: int, item) -> None:
        self.m.messages += 1
        liked = item is not None and item in self.s.user_interests[receiver]
        if item is not None and not liked:
            self.m.spam += 1
        if self.m.log is not None:
            self.m.log.append((self.rnd, sender, receiver, "" if item is None else item, int(liked)))

    def needs_sampling(self, u: int) -> bool:
        if self.member_of[u]:
            return not all(self.sig_sat[u].values())
        return not self.satisfied[u]

    def satisfied_fraction(self) -> float:
        return sum(self.satisfied) / self.s.mu

    def end_round(self) -> float:
        done = sum(self.satisfied)
        self.m.satisfied_by_round.append(done)
        return done / self.s.mu

    def finish(self) -> SimMetrics:
        m = self.m
        m.rounds = self.rnd
        m.satisfied_users = sum(self.satisfied)
        pairs = [ok for d in self.sig_sat for ok in d.values()]
        m.satisfied_sig_fraction = sum(pairs) / len(pairs) if pairs else 0.0
        return m


def _draw_untested(rng, eta: int, tested: set, first: int) -> int | None:
    item = first
    if len(tested) >= eta:
        return None
    while item in tested:
        item = int(rng.integers(eta))
    return item


def run_baseline(scenario: Scenario, config: ProtocolConfig, rng=None, log: bool = False) -> SimMetrics:
    """Global sample/query alternation.

    Odd rounds sample, even rounds query; an agent stops at its own
    satisfaction, and the run stops once the satisfied fraction reaches
    ``lambda_target``. Query and reply are one message each; self-queries are
    local and free.
    """
    rng = np.random.default_rng(config.seed if rng is None else rng)
    st = _State(scenario, "baseline", config.seed, log)
    mu, eta = scenario.mu, scenario.eta
    liked = [[] for _ in range(mu)]
    while st.rnd < config.max_rounds:
        st.rnd += 1
        active = [u for u in range(mu) if not st.satisfied[u]]
        if st.rnd % 2:
            draws = rng.integers(eta, size=len(active)).tolist()
            for u, item in zip(active, draws):
                if st.test(u, item, sampled=True) and item not in liked[u]:
                    liked[u].append(item)
        else:
            was_satisfied = list(st.satisfied)
            offered = [len(x) for x in liked]
            targets = rng.integers(mu, size=len(active)).tolist()
            for u, v in zip(active, targets):
                n = offered[v]
                item = liked[v][int(rng.integers(n))] if n else None
                if v != u:
                    st.deliver(u, v, None)
                    if not was_satisfied[v]:
                        st.m.spam += 1
                    st.deliver(v, u, item)
                if item is not None and st.test(u, item, sampled=False) and item not in liked[u]:
                    liked[u].append(item)
        if st.end_round() >= scenario.lambda_target:
            st.m.completed = True
            break
    return st.finish()


def run_mailing_list(scenario: Scenario, config: ProtocolConfig, rng=None, log: bool = False) -> SimMetrics:
    """Clique-per-SIG broadcast protocol.

    The run ends when no agent needs to sample and nothing is in flight, or
    at ``max_rounds``. A delivery of an item the recipient already holds is
    suppressed and not counted.
    """
    rng = np.random.default_rng(config.seed if rng is None else rng)
    st = _State(scenario, "mailing_list", config.seed, log)
    mu, eta = scenario.mu, scenario.eta
    neigh = [sorted(set().union(*(scenario.sigs[i].members for i in sigs)) - {u}) for u, sigs in enumerate(st.member_of)]
    holding = [set() for _ in range(mu)]
    served = [False] * scenario.ell
    inbox: list[list[int]] = [[] for _ in range(mu)]
    while st.rnd < config.max_rounds:
        st.rnd += 1
        for u in range(mu):
            for item in inbox[u]:
                if item not in st.tested[u]:
                    st.tested[u].add(item)
                    st.test(u, item, sampled=False)
        inbox = [[] for _ in range(mu)]
        in_flight = False
        served_now = list(served)
        samplers = [u for u in range(mu) if _ml_wants_sample(st, u, served_now)]
        first = rng.integers(eta, size=len(samplers)).tolist()
        for u, cand in zip(samplers, first):
            item = _draw_untested(rng, eta, st.tested[u], cand)
            if item is None:
                continue
            st.tested[u].add(item)
            holding[u].add(item)
            if not st.test(u, item, sampled=True):
                continue
            st.m.broadcasts += 1
            for v in neigh[u]:
                if item in holding[v] or item in st.tested[v]:
                    continue
                holding[v].add(item)
                inbox[v].append(item)
                st.deliver(u, v, item)
                in_flight = True
            for i in st.member_of[u]:
                if item in scenario.sigs[i].common_items:
                    served[i] = True
        st.end_round()
        if not in_flight and not any(_ml_wants_sample(st, u, served) for u in range(mu)):
            st.m.completed = True
            break
    return st.finish()


def _ml_wants_sample(st: _State, u: int, served: Sequence[bool]) -> bool:
    sigs = st.member_of[u]
    if sigs:
        return not all(served[i] for i in sigs)
    return not st.satisfied[u]


def random_placement(scenario: Scenario, graph: Graph, rng=None) -> np.ndarray:
    """Uniformly random bijection of users onto the alive nodes."""
    alive = np.flatnonzero(graph.alive)
    if len(alive) != scenario.mu:
        raise PlacementError(f"{len(alive)} alive nodes for {scenario.mu} users")
    return np.random.default_rng(rng).permutation(alive)


def _check_placement(scenario: Scenario, graph: Graph, placement) -> np.ndarray:
    placement = np.asarray(placement, dtype=np.int64)
    if placement.shape != (scenario.mu,):
        raise PlacementError("placement must map every user to one node")
    if len(np.unique(placement)) != scenario.mu:
        raise PlacementError("placement maps two users to one node")
    if placement.min() < 0 or placement.max() >= graph.node_count or not graph.alive[placement].all():
        raise PlacementError("placement uses a missing or failed node")
    if graph.survivors != scenario.mu:
        raise PlacementError("placement does not cover every alive node")
    return placement


def _user_neighbors(graph: Graph, placement: np.ndarray) -> list[list[int]]:
    user_at = np.full(graph.node_count, -1, dtype=np.int64)
    user_at[placement] = np.arange(len(placement))
    adj = graph.alive_adjacency()
    ptr, idx = adj.indptr, adj.indices
    return [sorted(user_at[idx[ptr[n]:ptr[n + 1]]].tolist()) for n in placement]


def run_word_of_mouth(
    scenario: Scenario,
    graph: Graph,
    placement,
    config: ProtocolConfig,
    rng=None,
    initial_items: Mapping[int, int] | None = None,
    log: bool = False,
) -> SimMetrics:
    """Interest-gated flooding on ``graph``.

    ``placement[u]`` is the node of user ``u``. ``initial_items`` injects
    discoveries before round 1: each listed user holds the item as if it had
    just found it, without counting a sample. The run stops once the
    satisfied fraction reaches ``lambda_target``, when nothing is left to do,
    or at ``max_rounds``.

    Raises
    ------
    PlacementError
        If ``placement`` is not a bijection onto the alive nodes.
    """
    placement = _check_placement(scenario, graph, placement)
    rng = np.random.default_rng(config.seed if rng is None else rng)
    st = _State(scenario, "word_of_mouth", config.seed, log)
    mu, eta = scenario.mu, scenario.eta
    fprob = config.forward_prob_uninterested
    neigh = _user_neighbors(graph, placement)
    # item -> senders that delivered it to u, per agent
    got_from: list[dict] = [dict() for _ in range(mu)]
    inbox: list[list[int]] = [[] for _ in range(mu)]
    next_inbox: list[list[int]] = [[] for _ in range(mu)]

    def send_all(u, item):
        skip = got_from[u].get(item, ())
        sent = False
        for v in neigh[u]:
            if v in skip:
                continue
            st.deliver(u, v, item)
            senders = got_from[v].setdefault(item, set())
            if not senders:
                next_inbox[v].append(item)
            senders.add(u)
            sent = True
        return sent

    if initial_items:
        for u, item in sorted(initial_items.items()):
            st.tested[u].add(item)
            if st.observe(u, item):
                send_all(u, item)

    while st.rnd < config.max_rounds:
        st.rnd += 1
        inbox, next_inbox = next_inbox, [[] for _ in range(mu)]
        in_flight = False
        for u in range(mu):
            for item in inbox[u]:
                if item in st.tested[u]:
                    continue
                st.tested[u].add(item)
                if st.test(u, item, sampled=False) or (fprob > 0 and rng.random() < fprob):
                    in_flight |= send_all(u, item)
        samplers = [u for u in range(mu) if st.needs_sampling(u)]
        first = rng.integers(eta, size=len(samplers)).tolist()
        for u, cand in zip(samplers, first):
            item = _draw_untested(rng, eta, st.tested[u], cand)
            if item is None:
                continue
            st.tested[u].add(item)
            if st.test(u, item, sampled=True):
                in_flight |= send_all(u, item)
        if st.end_round() >= scenario.lambda_target:
            st.m.completed = True
            break
        if not in_flight and not any(st.needs_sampling(u) for u in range(mu)):
            st.m.completed = True
            break
    return st.finish()


def run_protocol(scenario: Scenario, config: ProtocolConfig, graph: Graph | None = None, placement=None, **kw) -> SimMetrics:
    if config.kind == "baseline":
        return run_baseline(scenario, config, **kw)
    if config.kind == "mailing_list":
        return run_mailing_list(scenario, config, **kw)
    if graph is None:
        raise ValueError("word_of_mouth needs a graph")
    if placement is None:
        placement = random_placement(scenario, graph, np.random.default_rng([config.seed, 1]))
    return run_word_of_mouth(scenario, graph, placement, config, **kw)


def measure_sig_connectivity(graph: Graph, sig: SIGSpec, placement) -> tuple[float, float, float]:
    """Connectivity of a SIG inside the host graph.

    Returns the largest component of the member-induced subgraph and the
    share of members with no member neighbour, both as fractions of ``|S|``,
    and the expansion coefficient of the member set in the full graph.
    """
    from .graph import expansion_boundary

    placement = np.asarray(placement, dtype=np.int64)
    nodes = placement[sorted(sig.members)]
    mask = np.zeros(graph.node_count, dtype=bool)
    mask[nodes] = True
    induced = graph.with_alive(graph.alive & mask)
    sizes = components(induced)
    size = len(nodes)
    orphans = sum(1 for c in sizes if c == 1)
    return sizes[0] / size, orphans / size, expansion_boundary(graph, nodes)


def sig_components(graph: Graph, sig: SIGSpec, placement) -> list[np.ndarray]:
    """User ids of each connected component of the member-induced subgraph."""
    from scipy.sparse.csgraph import connected_components

    placement = np.asarray(placement, dtype=np.int64)
    users = np.array(sorted(sig.members))
    nodes = placement[users]
    sub = graph.simple_adjacency[nodes][:, nodes]
    _, labels = connected_components(sub, directed=False)
    groups = [users[labels == c] for c in range(labels.max() + 1)]
    return sorted(groups, key=len, reverse=True)


def write_message_log(metrics: SimMetrics, out) -> None:
    """CSV dump of the delivery log: ``round,sender,receiver,item,liked``."""
    if metrics.log is None:
        raise ValueError("run was not logged; pass log=True")
    if isinstance(out, str):
        with open(out, "w", newline="") as fh:
            return write_message_log(metrics, fh)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["round", "sender", "receiver", "item", "liked"])
    w.writerows(metrics.log)
