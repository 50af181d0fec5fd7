"""
Random subgraphs of scale-free networks
=======================================

Closed-form predictions for what survives when the nodes of an (alpha, beta)
power-law graph fail independently with probability ``p``:

* orphan and degree-1 counts among the survivors,
* the power-law slope ``beta_prime`` of the surviving subgraph,
* the failure rate at which ``beta_prime`` crosses the connectivity threshold
  ``BETA0`` (no giant component beyond it),
* the non-orphan survivor curves (size of a SIG's subgraph minus orphans).

The series are evaluated by direct summation with compensated accumulation
(:func:`math.fsum`). Root finding is bisection throughout; every function
involved is monotone on its bracket.

All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BETA0",
    "DomainError",
    "PowerLawParams",
    "SubgraphTheoryReport",
    "riemann_zeta",
    "truncated_zeta",
    "chi",
    "xi",
    "orphan_and_degree1_counts",
    "orphan_fraction",
    "inverse_zeta",
    "inverse_truncated_zeta",
    "beta_prime",
    "critical_failure_rate",
    "alpha_prime",
    "figure2_curve",
    "subgraph_report",
]

#: Slope beyond which a min-degree-1 power-law graph has no giant component.
BETA0 = 3.47875

ZETA_LOWER = 1.0 + 1e-6
ZETA_UPPER = 60.0

# Direct terms before the Euler-Maclaurin tail takes over.
_ZETA_TERMS = 2000
_RESIDUAL_TOL = 1e-9
_BETA_TOL = 1e-13
_P_TOL = 1e-6
_TERM_RTOL = 1e-16
_SCAN_POINTS = 2000


class DomainError(ValueError):
    """Argument outside the domain of a series or its inverse."""


@dataclass(frozen=True)
class PowerLawParams:
    """Aiello-style power-law degree distribution.

    The expected number of nodes of degree ``k`` is ``e**alpha / k**beta``
    for ``1 <= k <= e**(alpha / beta)``.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.beta > 1:
            raise ValueError(f"beta must be > 1, got {self.beta}")

    def max_degree(self) -> int:
        # Guard against exp(a/b) landing a hair under an integer.
        return max(1, int(math.floor(math.exp(self.alpha / self.beta) * (1 + 1e-12))))

    def expected_count(self, k):
        return math.exp(self.alpha) / np.asarray(k, dtype=float) ** self.beta

    def degree_counts(self) -> np.ndarray:
        """Rounded node counts for degrees ``1..max_degree`` (round half up)."""
        k = np.arange(1, self.max_degree() + 1)
        return np.floor(self.expected_count(k) + 0.5).astype(np.int64)

    def total_nodes(self) -> int:
        return int(self.degree_counts().sum())

    @classmethod
    def for_size(cls, n: int, beta: float) -> "PowerLawParams":
        """Parameters whose rounded node count is as close to ``n`` as possible.

        ``total_nodes`` is nondecreasing in ``alpha``, so a bisection on
        ``alpha`` followed by a neighbour check is enough.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        lo, hi = 0.0, math.log(n) + 1.0
        while cls(hi, beta).total_nodes() < n:
            hi += 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if cls(mid, beta).total_nodes() < n:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-12:
                break
        best = min((lo, hi), key=lambda a: abs(cls(a, beta).total_nodes() - n))
        return cls(best, beta)


@dataclass(frozen=True)
class SubgraphTheoryReport:
    """Analytical description of the surviving subgraph at failure rate ``p``.

    Fractions are relative to the expected size of the unfailed graph,
    ``e**alpha * truncated_zeta(beta, max_degree)``. ``beta_prime`` is
    ``math.inf`` when the subgraph is supercritical (past every finite slope
    the inverse zeta can return). ``truncated`` is set when ``beta <= 2`` and
    the truncated zeta replaces the divergent full one.
    """

    p: float
    chi: float
    xi: float
    orphan_count: float
    degree1_count: float
    beta_prime: float
    survivor_fraction: float
    orphan_fraction: float
    nonorphan_fraction: float
    critical: bool
    truncated: bool

    @property
    def supercritical(self) -> bool:
        return math.isinf(self.beta_prime)


def _fsum_terms(terms: np.ndarray) -> float:
    return math.fsum(terms.tolist())


def riemann_zeta(beta: float) -> float:
    """Riemann zeta function for real ``beta > 1``.

    Sums the first terms directly and closes the series with an
    Euler-Maclaurin tail, which is accurate to well below 1e-12 for the
    number of direct terms used here.

    Raises
    ------
    DomainError
        If ``beta <= 1``, where the series diverges.
    """
    s = float(beta)
    if not s > 1.0 + 1e-9:
        raise DomainError(f"zeta series diverges for beta={beta}")
    n = _ZETA_TERMS
    k = np.arange(1, n, dtype=float)
    head = k ** -s
    big_n = float(n)
    tail = [
        big_n ** (1 - s) / (s - 1),
        0.5 * big_n ** -s,
        s * big_n ** (-s - 1) / 12,
        -s * (s + 1) * (s + 2) * big_n ** (-s - 3) / 720,
    ]
    return math.fsum(head.tolist() + tail)


def truncated_zeta(beta: float, kmax: int) -> float:
    """Finite sum ``sum_{k=1..kmax} k**-beta``, defined for any ``beta > 0``."""
    if kmax < 1:
        raise ValueError(f"kmax must be >= 1, got {kmax}")
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    k = np.arange(1, int(kmax) + 1, dtype=float)
    return _fsum_terms(k ** -float(beta))


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"failure rate must lie in [0, 1], got {p}")
    return p


def _cut_series(terms: np.ndarray) -> np.ndarray:
    # Drop the tail once a term is negligible against the running sum.
    partial = np.cumsum(terms)
    small = terms < _TERM_RTOL * partial
    if small.any():
        stop = int(np.argmax(small))
        if stop > 0:
            return terms[:stop]
    return terms


def chi(params: PowerLawParams, p: float) -> float:
    """Weighted probability mass of nodes whose every neighbour failed.

    ``sum_{k=1..K} k**-beta * p**k`` with ``K = params.max_degree()``.
    """
    p = _check_p(p)
    if p == 0.0:
        return 0.0
    k = np.arange(1, params.max_degree() + 1, dtype=float)
    terms = k ** -params.beta * p ** k
    if p < 1.0:
        terms = _cut_series(terms)
    return _fsum_terms(terms)


def xi(params: PowerLawParams, p: float) -> float:
    """Weighted probability mass of nodes left with exactly one neighbour.

    ``sum_{k=1..K} k**-beta * k * (1 - p) * p**(k - 1)``.
    """
    p = _check_p(p)
    if p == 1.0:
        return 0.0
    k = np.arange(1, params.max_degree() + 1, dtype=float)
    terms = k ** (1.0 - params.beta) * (1.0 - p) * p ** (k - 1)
    if p > 0.0:
        terms = _cut_series(terms)
    return _fsum_terms(terms)


def orphan_and_degree1_counts(params: PowerLawParams, p: float) -> tuple[float, float]:
    """Expected numbers of surviving nodes with zero and with one neighbour."""
    scale = (1.0 - _check_p(p)) * math.exp(params.alpha)
    return scale * chi(params, p), scale * xi(params, p)


def orphan_fraction(params: PowerLawParams, p: float) -> float:
    """Fraction of survivors that retain no neighbours, ``chi / zeta_K(beta)``."""
    return chi(params, p) / truncated_zeta(params.beta, params.max_degree())


def _bisect_decreasing(f, target, lo, hi, residual_tol=_RESIDUAL_TOL, width_tol=_BETA_TOL):
    """Solve ``f(x) = target`` for decreasing ``f`` on ``[lo, hi]``."""
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        val = f(mid)
        if val > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= width_tol * max(1.0, mid) and abs(val - target) <= residual_tol:
            break
    return 0.5 * (lo + hi)


def inverse_zeta(target: float) -> float:
    """The ``beta`` in ``(1 + 1e-6, 60]`` with ``riemann_zeta(beta) == target``.

    Raises
    ------
    DomainError
        ``target <= 1`` (outside the range of zeta), or ``target`` larger than
        zeta at the lower end of the bracket.
    """
    target = float(target)
    if not target > 1.0:
        raise DomainError(f"zeta never reaches {target} for real beta > 1")
    if target > riemann_zeta(ZETA_LOWER):
        raise DomainError(f"zeta^-1({target}) lies below beta = {ZETA_LOWER}")
    if target <= riemann_zeta(ZETA_UPPER):
        return ZETA_UPPER
    return _bisect_decreasing(riemann_zeta, target, ZETA_LOWER, ZETA_UPPER)


def inverse_truncated_zeta(target: float, kmax: int) -> float:
    """Inverse of ``beta -> truncated_zeta(beta, kmax)`` on ``(0, 60]``."""
    target = float(target)
    if kmax < 2:
        raise DomainError("truncated zeta with kmax=1 is constant")
    if not 1.0 < target < kmax:
        raise DomainError(f"target {target} outside (1, {kmax})")
    if target <= truncated_zeta(ZETA_UPPER, kmax):
        return ZETA_UPPER
    return _bisect_decreasing(lambda b: truncated_zeta(b, kmax), target, 1e-9, ZETA_UPPER)


def _uses_full_zeta(params: PowerLawParams) -> bool:
    return params.beta > 2.0


def _zeta_argument(params: PowerLawParams, p: float) -> float:
    """``(zeta(beta) - chi) / xi``; ``-inf`` stands in for ``xi == 0``."""
    x = xi(params, p)
    if x == 0.0:
        return -math.inf
    if _uses_full_zeta(params):
        z = riemann_zeta(params.beta)
    else:
        z = truncated_zeta(params.beta, params.max_degree())
    return (z - chi(params, p)) / x


def beta_prime(params: PowerLawParams, p: float) -> float:
    """Power-law slope of the subgraph that survives failure rate ``p``.

    For ``beta > 2`` the full Riemann zeta is inverted; for ``beta <= 2`` it
    diverges and the truncated zeta with the graph's degree cutoff is used
    on both sides. Returns ``math.inf`` when the subgraph is supercritical:
    the zeta argument is ``<= 1`` or the slope leaves the bisection bracket.
    ``p == 1`` is always supercritical.
    """
    p = _check_p(p)
    if p == 0.0:
        return float(params.beta)
    target = _zeta_argument(params, p)
    try:
        if _uses_full_zeta(params):
            if target <= riemann_zeta(ZETA_UPPER):
                return math.inf
            return inverse_zeta(target)
        kmax = params.max_degree()
        if target <= truncated_zeta(ZETA_UPPER, kmax):
            return math.inf
        return inverse_truncated_zeta(target, kmax)
    except DomainError:
        return math.inf


def critical_failure_rate(params: PowerLawParams) -> float:
    """Failure rate ``p_c`` at which ``beta_prime`` reaches ``BETA0``.

    Returns 0 when ``beta >= BETA0`` already, and 1 when the slope stays
    below the threshold for every ``p < 1``. Since zeta is decreasing,
    ``beta_prime >= BETA0`` is tested as ``argument <= zeta(BETA0)``, which
    avoids an inner inversion per bisection step.

    With a finite degree cutoff the slope turns back down as ``p -> 1`` (the
    numerator keeps the zeta tail beyond the cutoff), so the first crossing
    is located on a coarse grid before bisecting.
    """
    if params.beta >= BETA0:
        return 0.0
    if _uses_full_zeta(params):
        z0 = riemann_zeta(BETA0)
    else:
        kmax = params.max_degree()
        if kmax < 2:
            return 1.0
        z0 = truncated_zeta(BETA0, kmax)

    def past_threshold(p):
        return _zeta_argument(params, p) <= z0

    grid = np.linspace(0.0, 1.0, _SCAN_POINTS + 1)[:-1]
    lo = hi = None
    for prev, cur in zip(grid[:-1], grid[1:]):
        if past_threshold(cur):
            lo, hi = float(prev), float(cur)
            break
    if hi is None:
        return 1.0
    while hi - lo > _P_TOL / 4:
        mid = 0.5 * (lo + hi)
        if past_threshold(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def alpha_prime(survivor_nonorphan_count: float, beta_prime: float) -> float:
    """Size parameter of the surviving subgraph.

    The unique ``alpha'`` for which ``e**alpha' * zeta(beta_prime)`` equals the
    number of non-orphan survivors.
    """
    if not survivor_nonorphan_count > 0:
        raise DomainError("survivor count must be positive")
    return math.log(survivor_nonorphan_count / riemann_zeta(beta_prime))


def figure2_curve(params: PowerLawParams, p_grid: Iterable[float]) -> list[tuple[float, float]]:
    """Non-orphan survivor fraction ``(1 - p) * (1 - chi / zeta_K)`` on a grid."""
    zk = truncated_zeta(params.beta, params.max_degree())
    out = []
    for p in p_grid:
        p = _check_p(p)
        out.append((p, (1.0 - p) * (1.0 - chi(params, p) / zk)))
    return out


def subgraph_report(params: PowerLawParams, p: float) -> SubgraphTheoryReport:
    p = _check_p(p)
    zk = truncated_zeta(params.beta, params.max_degree())
    c, x = chi(params, p), xi(params, p)
    orphans, deg1 = orphan_and_degree1_counts(params, p)
    bp = beta_prime(params, p)
    survivors = 1.0 - p
    of = c / zk
    return SubgraphTheoryReport(
        p=p,
        chi=c,
        xi=x,
        orphan_count=orphans,
        degree1_count=deg1,
        beta_prime=bp,
        survivor_fraction=survivors,
        orphan_fraction=of,
        nonorphan_fraction=survivors * (1.0 - of),
        critical=bp >= BETA0,
        truncated=not _uses_full_zeta(params),
    )


def reference_params(beta: float, n: int = 100_000) -> PowerLawParams:
    """Parameters for an ``n``-node graph, the default desk scale."""
    return PowerLawParams.for_size(n, beta)


def curve_family(betas: Sequence[float], p_grid: Sequence[float], n: int = 100_000):
    """``{beta: figure2_curve(...)}`` for graphs of roughly ``n`` nodes."""
    return {b: figure2_curve(reference_params(b, n), p_grid) for b in betas}
