"""Closed-form sample, message and spam complexity of the three protocols."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import Graph
from .scenario import Scenario

__all__ = [
    "ComplexityPrediction",
    "predict_baseline",
    "predict_mailing_list",
    "predict_word_of_mouth",
    "predict",
]


@dataclass(frozen=True)
class ComplexityPrediction:
    """Predicted counters; ``None`` where no closed form exists."""

    model: str
    samples: float
    messages: Optional[float]
    spam: Optional[float]


def _discovery_term(s: Scenario) -> float:
    # expected pooled samples before the rarest SIG finds a common item
    return s.eta / min(len(sig.common_items) for sig in s.sigs)


def _broadcast_terms(s: Scenario) -> list[float]:
    """``|S_i| * avg_{u in S_i} |P(u)| / |P(S_i)|`` per SIG."""
    out = []
    for sig in s.sigs:
        avg_pu = np.mean([len(s.user_interests[u]) for u in sig.members])
        out.append(len(sig.members) * avg_pu / len(sig.common_items))
    return out


def predict_mailing_list(s: Scenario) -> ComplexityPrediction:
    terms = _broadcast_terms(s)
    per_sig = float(np.mean(terms))
    return ComplexityPrediction(
        "mailing_list",
        samples=s.ell * (_discovery_term(s) + per_sig),
        messages=s.ell * per_sig,
        spam=s.ell * float(np.mean([t - 1 for t in terms])),
    )


def predict_baseline(s: Scenario) -> ComplexityPrediction:
    """Sample/query baseline; ``spam`` is the pre-discovery floor only."""
    largest = max(len(sig.members) for sig in s.sigs)
    core = _discovery_term(s) + s.mu * math.log(largest)
    return ComplexityPrediction(
        "baseline",
        samples=2 * s.ell * core,
        messages=s.ell * core,
        spam=s.ell * _discovery_term(s),
    )


def predict_word_of_mouth(s: Scenario, gamma: float, graph: Graph | None = None, placement=None) -> ComplexityPrediction:
    """Word-of-mouth sample complexity with expansion coefficient ``gamma``.

    Messages are only bounded structurally: with a graph and placement, the
    number of edges inside each SIG plus the edges leaving it, summed over
    SIGs. Spam has no closed form and is left as ``None``.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    per_sig = float(np.mean([(1 + gamma) * t for t in _broadcast_terms(s)]))
    messages = None
    if graph is not None and placement is not None:
        messages = float(sum(_sig_edge_budget(graph, sig.members, placement) for sig in s.sigs))
    return ComplexityPrediction(
        "word_of_mouth",
        samples=s.ell * (_discovery_term(s) + per_sig),
        messages=messages,
        spam=None,
    )


def _sig_edge_budget(graph: Graph, members, placement) -> int:
    nodes = np.asarray(placement, dtype=np.int64)[sorted(members)]
    inside = np.zeros(graph.node_count, dtype=bool)
    inside[nodes] = True
    adj = graph.alive_adjacency().tocoo()
    a, b = inside[adj.row], inside[adj.col]
    internal = np.count_nonzero(a & b) // 2
    boundary = np.count_nonzero(a & ~b)
    return int(internal + boundary)


def predict(kind: str, s: Scenario, gamma: float = 0.0, graph=None, placement=None) -> ComplexityPrediction:
    if kind == "baseline":
        return predict_baseline(s)
    if kind == "mailing_list":
        return predict_mailing_list(s)
    if kind == "word_of_mouth":
        return predict_word_of_mouth(s, gamma, graph, placement)
    raise ValueError(f"unknown protocol {kind!r}")
