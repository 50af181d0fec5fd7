"""
Configuration-model scale-free graphs and percolation measurements
==================================================================

Graphs are undirected multigraphs stored as an edge array; self-loops and
parallel edges produced by stub matching are kept, so the degree sequence is
reproduced exactly. Measurements that care about *neighbours* (orphans,
components, protocols) go through the collapsed simple graph.

Everything random takes a :class:`numpy.random.Generator`; a fixed seed gives
bit-identical results.
"""

from __future__ import annotations

import io
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .theory import PowerLawParams

__all__ = [
    "Graph",
    "DegreeHistogram",
    "PercolationReport",
    "GenerationError",
    "ParityError",
    "InsufficientDataError",
    "realize_degree_sequence",
    "configuration_model",
    "generate",
    "simple_neighbors",
    "fail_uniform",
    "components",
    "degree_histogram",
    "percolate_report",
    "fit_power_law_slope",
    "expansion_boundary",
    "write_edge_list",
    "read_edge_list",
]

#: Largest-component share of survivors below which the graph counts as disintegrated.
GIANT_THRESHOLD = 0.01


class GenerationError(ValueError):
    """The requested degree sequence cannot be realised."""


class ParityError(GenerationError):
    """Odd number of stubs; no perfect matching exists."""


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected multigraph with per-node survival flags.

    ``edges`` has shape ``(m, 2)``; a self-loop ``(u, u)`` contributes two to
    the degree of ``u``. ``alive`` defaults to all True.
    """

    node_count: int
    edges: np.ndarray
    alive: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= self.node_count):
            raise ValueError("edge endpoint out of range")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        alive = self.alive
        if alive is None:
            alive = np.ones(self.node_count, dtype=bool)
        alive = np.asarray(alive, dtype=bool).copy()
        if alive.shape != (self.node_count,):
            raise ValueError("alive mask has wrong length")
        alive.setflags(write=False)
        object.__setattr__(self, "alive", alive)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        """Multigraph degrees (self-loops count twice), ignoring failures."""
        return np.bincount(self.edges.ravel(), minlength=self.node_count)

    def neighbors(self, u: int) -> list[int]:
        """Neighbour multiset of ``u``; a self-loop lists ``u`` twice."""
        e = self.edges
        out = e[e[:, 0] == u, 1].tolist() + e[e[:, 1] == u, 0].tolist()
        return sorted(out)

    def self_loop_count(self) -> int:
        return int(np.count_nonzero(self.edges[:, 0] == self.edges[:, 1]))

    def self_loop_nodes(self) -> int:
        """Number of distinct nodes carrying at least one self-loop."""
        loops = self.edges[self.edges[:, 0] == self.edges[:, 1], 0]
        return len(np.unique(loops))

    def multi_edge_count(self) -> int:
        """Edges in excess of one per unordered non-loop pair."""
        e = self._sorted_pairs()
        return len(e) - len(np.unique(e, axis=0)) if len(e) else 0

    def _sorted_pairs(self) -> np.ndarray:
        e = self.edges[self.edges[:, 0] != self.edges[:, 1]]
        return np.sort(e, axis=1)

    @cached_property
    def simple_adjacency(self) -> sparse.csr_matrix:
        """Boolean CSR adjacency of the collapsed simple graph, all nodes."""
        e = self._sorted_pairs()
        if len(e):
            e = np.unique(e, axis=0)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(len(rows), dtype=np.int8)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.node_count,) * 2)

    def alive_adjacency(self) -> sparse.csr_matrix:
        """Simple adjacency restricted to edges between two alive nodes."""
        adj = self.simple_adjacency
        if self.alive.all():
            return adj
        mask = sparse.diags(self.alive.astype(np.int8))
        return (mask @ adj @ mask).tocsr()

    def with_alive(self, alive: np.ndarray) -> "Graph":
        g = Graph(self.node_count, self.edges, alive, dict(self.meta))
        # The simple adjacency depends only on edges; share it.
        if "simple_adjacency" in self.__dict__:
            g.__dict__["simple_adjacency"] = self.simple_adjacency
        return g

    @property
    def survivors(self) -> int:
        return int(self.alive.sum())


@dataclass(frozen=True)
class DegreeHistogram:
    counts: dict

    @property
    def node_count(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, k):
        return self.counts.get(k, 0)

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> "DegreeHistogram":
        return cls(dict(sorted(Counter(int(d) for d in degrees).items())))


@dataclass(frozen=True)
class PercolationReport:
    p: float
    survivors: int
    orphans: int
    degree1: int
    largest_component: int
    largest_fraction_of_survivors: float
    fitted_beta: float
    seed: int
    node_count: int = 0

    @property
    def orphan_fraction(self) -> float:
        """Orphans as a share of survivors (NaN with no survivors)."""
        return self.orphans / self.survivors if self.survivors else math.nan

    @property
    def disintegrated(self) -> bool:
        return self.largest_fraction_of_survivors < GIANT_THRESHOLD


def realize_degree_sequence(params: PowerLawParams, n: int | None = None, rng=None) -> np.ndarray:
    """Degree sequence for an (alpha, beta) power law.

    With ``n=None`` (deterministic mode) the sequence holds
    ``round(e**alpha / k**beta)`` nodes of each degree ``k`` up to
    ``params.max_degree()``, ordered by degree. With an integer ``n`` the
    degrees are ``n`` i.i.d. draws from ``P(k) ~ k**-beta`` on the same range.

    An odd stub total is repaired by giving one extra stub to a random node
    of minimum degree.

    Raises
    ------
    GenerationError
        Empty sequence, or a single stub in total (no parity repair is
        attempted there).
    """
    rng = np.random.default_rng(rng)
    kmax = params.max_degree()
    if n is None:
        counts = params.degree_counts()
        degrees = np.repeat(np.arange(1, kmax + 1), counts)
    else:
        if n < 1:
            raise GenerationError("sampled mode needs n >= 1")
        k = np.arange(1, kmax + 1)
        w = k ** -float(params.beta)
        degrees = rng.choice(k, size=int(n), p=w / w.sum())
    degrees = degrees.astype(np.int64)
    if degrees.size == 0:
        raise GenerationError(f"{params} rounds to an empty graph")
    if degrees.sum() % 2:
        if degrees.sum() == 1:
            raise GenerationError("a single stub cannot be matched")
        candidates = np.flatnonzero(degrees == degrees.min())
        degrees[rng.choice(candidates)] += 1
    return degrees


def configuration_model(degrees, rng=None) -> Graph:
    """Uniform random stub matching; keeps self-loops and parallel edges."""
    rng = np.random.default_rng(rng)
    degrees = np.asarray(degrees, dtype=np.int64)
    if (degrees < 0).any():
        raise GenerationError("negative degree")
    if degrees.sum() % 2:
        raise ParityError(f"stub total {degrees.sum()} is odd")
    stubs = np.repeat(np.arange(len(degrees)), degrees)
    stubs = rng.permutation(stubs)
    return Graph(len(degrees), stubs.reshape(-1, 2))


def generate(params: PowerLawParams, seed: int, n: int | None = None) -> Graph:
    """Degree sequence plus stub matching from a single seed."""
    rng = np.random.default_rng(seed)
    g = configuration_model(realize_degree_sequence(params, n, rng), rng)
    g.meta.update(seed=seed, alpha=params.alpha, beta=params.beta)
    return g


def simple_neighbors(graph: Graph) -> list[set]:
    """Per-node neighbour sets: parallel edges collapsed, self-loops dropped.

    Failures are ignored; callers filter on ``graph.alive`` as needed.
    """
    adj = graph.simple_adjacency
    ptr, idx = adj.indptr, adj.indices
    return [set(idx[ptr[u]:ptr[u + 1]].tolist()) for u in range(graph.node_count)]


def fail_uniform(graph: Graph, p: float, rng=None) -> Graph:
    """Kill each node independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(rng)
    dead = rng.random(graph.node_count) < p
    return graph.with_alive(graph.alive & ~dead)


def components(graph: Graph) -> list[int]:
    """Sizes of the connected components of the alive subgraph, descending."""
    if graph.survivors == 0:
        return []
    _, labels = connected_components(graph.alive_adjacency(), directed=False)
    sizes = np.bincount(labels[graph.alive])
    sizes = sizes[sizes > 0]
    return sorted(sizes.tolist(), reverse=True)


def _alive_simple_degrees(graph: Graph) -> np.ndarray:
    adj = graph.alive_adjacency()
    return np.diff(adj.indptr)[graph.alive]


def degree_histogram(graph: Graph, simple: bool = True) -> DegreeHistogram:
    """Degree histogram of the alive nodes.

    ``simple=True`` counts distinct alive neighbours; ``simple=False`` gives
    raw multigraph degrees of alive nodes, ignoring failures of neighbours.
    """
    if simple:
        return DegreeHistogram.from_degrees(_alive_simple_degrees(graph))
    return DegreeHistogram.from_degrees(graph.degrees()[graph.alive])


def fit_power_law_slope(hist: DegreeHistogram, kmin: int = 1, kmax_fit: int = 10) -> float:
    """Least-squares slope of ``log count`` against ``log k``, as a positive beta.

    Only nonzero bins with ``kmin <= k <= kmax_fit`` enter the fit.
    """
    ks = [k for k, c in hist.counts.items() if kmin <= k <= kmax_fit and k >= 1 and c > 0]
    if len(ks) < 2:
        raise InsufficientDataError(f"{len(ks)} usable bins in [{kmin}, {kmax_fit}]")
    x = np.log(np.array(ks, dtype=float))
    y = np.log(np.array([hist.counts[k] for k in ks], dtype=float))
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def percolate_report(graph: Graph, p: float, rng=None, seed: int = -1) -> PercolationReport:
    """Fail nodes at rate ``p`` and measure what is left.

    Orphans are survivors with no alive neighbour in the collapsed graph, so
    a node whose only edges are self-loops is an orphan. The slope is fitted
    to the degree histogram of the non-orphan survivors.
    """
    failed = fail_uniform(graph, p, rng)
    deg = _alive_simple_degrees(failed)
    survivors = failed.survivors
    sizes = components(failed)
    largest = sizes[0] if sizes else 0
    nonorphan = DegreeHistogram.from_degrees(deg[deg > 0])
    try:
        fitted = fit_power_law_slope(nonorphan)
    except InsufficientDataError:
        fitted = math.nan
    return PercolationReport(
        p=float(p),
        survivors=survivors,
        orphans=int(np.count_nonzero(deg == 0)),
        degree1=int(np.count_nonzero(deg == 1)),
        largest_component=int(largest),
        largest_fraction_of_survivors=largest / survivors if survivors else 0.0,
        fitted_beta=fitted,
        seed=seed,
        node_count=graph.node_count,
    )


def expansion_boundary(graph: Graph, node_set: Iterable[int]) -> float:
    """Outside boundary size of ``node_set`` divided by its size.

    Counts the alive nodes outside the set that have a neighbour inside it.
    """
    nodes = np.unique(np.fromiter(node_set, dtype=np.int64))
    if nodes.size == 0:
        raise ValueError("expansion of an empty node set is undefined")
    if not graph.alive[nodes].all():
        raise ValueError("node set contains failed nodes")
    inside = np.zeros(graph.node_count, dtype=bool)
    inside[nodes] = True
    adj = graph.alive_adjacency()
    touched = np.asarray(adj[nodes].sum(axis=0)).ravel() > 0
    boundary = touched & ~inside & graph.alive
    return int(boundary.sum()) / nodes.size


def write_edge_list(graph: Graph, out: TextIO | str, seed=None, alpha=None, beta=None) -> None:
    """``# nodes=N seed=S alpha=A beta=B`` header, then one ``u v`` per line."""
    meta = graph.meta
    seed = meta.get("seed") if seed is None else seed
    alpha = meta.get("alpha") if alpha is None else alpha
    beta = meta.get("beta") if beta is None else beta
    buf = io.StringIO()
    buf.write(f"# nodes={graph.node_count} seed={seed} alpha={_fmt(alpha)} beta={_fmt(beta)}\n")
    np.savetxt(buf, graph.edges, fmt="%d")
    if isinstance(out, str):
        with open(out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())


def _fmt(x):
    return "None" if x is None else repr(float(x))


def read_edge_list(src: TextIO | str) -> Graph:
    if isinstance(src, str):
        with open(src) as fh:
            return read_edge_list(fh)
    header = src.readline()
    if not header.startswith("#"):
        raise ValueError("edge list must start with a '# nodes=...' header")
    fields = dict(tok.split("=", 1) for tok in header[1:].split() if "=" in tok)
    if "nodes" not in fields:
        raise ValueError("edge list header lacks nodes=N")
    n = int(fields["nodes"])
    rows = [line.split() for line in src if line.strip() and not line.startswith("#")]
    edges = np.array(rows, dtype=np.int64).reshape(-1, 2)
    meta = {}
    for key in ("seed", "alpha", "beta"):
        val = fields.get(key, "None")
        if val != "None":
            meta[key] = int(val) if key == "seed" else float(val)
    return Graph(n, edges, meta=meta)
