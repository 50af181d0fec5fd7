"""Users, catalog, and special interest groups (SIGs) for the recommender runs.

Scenario files are INI text read with :mod:`configparser`::

    [scenario]
    eta = 1000
    mu = 20
    lambda_target = 1.0

    [sig.0]
    members = 0 1 2 ...
    common_items = 0 1 2 ...

    [users]
    0 = 0 1 2 17 345 ...

Instead of explicit ``[sig.*]`` and ``[users]`` blocks a file may carry a
``[generate]`` section holding :func:`build_scenario` arguments plus a
``seed``; the scenario is then rebuilt deterministically on load.
"""

from __future__ import annotations

import configparser
import io
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "SIGSpec",
    "Scenario",
    "InfeasibleScenarioError",
    "ScenarioParseError",
    "build_scenario",
    "reference_scenario",
    "dumps_scenario",
    "loads_scenario",
    "load_scenario",
    "save_scenario",
]


class InfeasibleScenarioError(ValueError):
    pass


class ScenarioParseError(ValueError):
    pass


@dataclass(frozen=True)
class SIGSpec:
    members: frozenset
    common_items: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        object.__setattr__(self, "common_items", frozenset(self.common_items))
        if len(self.members) < 2:
            raise InfeasibleScenarioError("a SIG needs at least two members")
        if not self.common_items:
            raise InfeasibleScenarioError("a SIG needs a nonempty common item set")


@dataclass(frozen=True)
class Scenario:
    mu: int
    eta: int
    sigs: tuple
    user_interests: tuple
    lambda_target: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "sigs", tuple(self.sigs))
        object.__setattr__(self, "user_interests", tuple(frozenset(s) for s in self.user_interests))
        self.validate()

    @property
    def ell(self) -> int:
        return len(self.sigs)

    def memberships(self) -> list[list[int]]:
        """SIG indices per user."""
        out = [[] for _ in range(self.mu)]
        for i, sig in enumerate(self.sigs):
            for u in sig.members:
                out[u].append(i)
        return out

    def covered_fraction(self) -> float:
        covered = set().union(*(s.members for s in self.sigs)) if self.sigs else set()
        return len(covered) / self.mu

    def validate(self) -> None:
        if len(self.user_interests) != self.mu:
            raise InfeasibleScenarioError(f"{len(self.user_interests)} interest sets for mu={self.mu}")
        if not 0 < self.lambda_target <= 1:
            raise InfeasibleScenarioError("lambda_target must lie in (0, 1]")
        for i, sig in enumerate(self.sigs):
            if max(sig.members) >= self.mu or min(sig.members) < 0:
                raise InfeasibleScenarioError(f"SIG {i} has a member outside 0..mu-1")
            if max(sig.common_items) >= self.eta or min(sig.common_items) < 0:
                raise InfeasibleScenarioError(f"SIG {i} has an item outside 0..eta-1")
            for u in sig.members:
                if not sig.common_items <= self.user_interests[u]:
                    raise InfeasibleScenarioError(f"user {u} lacks the common items of SIG {i}")
        if self.covered_fraction() < self.lambda_target:
            raise InfeasibleScenarioError(
                f"SIGs cover {self.covered_fraction():.3f} of users, below lambda={self.lambda_target}"
            )
        # Members should like SIG items more than random ones; advisory only.
        for i, sig in enumerate(self.sigs):
            for u in sig.members:
                pu = len(self.user_interests[u])
                if not pu / self.eta < len(sig.common_items) / pu:
                    warnings.warn(
                        f"user {u} in SIG {i}: |P(u)|/eta >= |P(S)|/|P(u)|; "
                        "recommendations are no better than random samples",
                        stacklevel=3,
                    )
                    return


def build_scenario(
    ell: int,
    sig_sizes: int | Sequence[int],
    sig_common_sizes: int | Sequence[int],
    user_extra_items: int,
    eta: int,
    mu: int,
    overlap: int = 0,
    lambda_target: float = 1.0,
    rng=None,
) -> Scenario:
    """Synthetic scenario with ``ell`` SIGs.

    SIG common item sets are disjoint consecutive blocks starting at item 0.
    Members are assigned consecutively from user 0; with ``overlap > 0`` SIG
    ``i`` reuses the last ``overlap`` members of SIG ``i - 1``. Every user then
    gets ``user_extra_items`` idiosyncratic items drawn uniformly from the
    items outside all common sets.

    Raises
    ------
    InfeasibleScenarioError
        Catalog too small, too few users, or coverage below ``lambda_target``.
    """
    rng = np.random.default_rng(rng)
    sizes = [sig_sizes] * ell if np.isscalar(sig_sizes) else list(sig_sizes)
    commons = [sig_common_sizes] * ell if np.isscalar(sig_common_sizes) else list(sig_common_sizes)
    if len(sizes) != ell or len(commons) != ell:
        raise InfeasibleScenarioError("need one size and one common-set size per SIG")
    if any(s < 2 for s in sizes) or any(c < 1 for c in commons):
        raise InfeasibleScenarioError("SIG sizes must be >= 2 and common sets nonempty")
    if overlap < 0 or any(overlap >= s for s in sizes):
        raise InfeasibleScenarioError("overlap must be smaller than every SIG")
    n_common = sum(commons)
    if eta < n_common + user_extra_items:
        raise InfeasibleScenarioError(f"eta={eta} cannot hold {n_common} common plus {user_extra_items} extra items")
    members_needed = sum(sizes) - overlap * (ell - 1)
    if mu < members_needed:
        raise InfeasibleScenarioError(f"mu={mu} < {members_needed} distinct SIG members")

    sigs, interests = [], [set() for _ in range(mu)]
    item, nxt, prev = 0, 0, []
    for size, common in zip(sizes, commons):
        shared = prev[len(prev) - overlap:] if overlap and prev else []
        fresh = list(range(nxt, nxt + size - len(shared)))
        nxt += len(fresh)
        members = shared + fresh
        items = range(item, item + common)
        item += common
        sigs.append(SIGSpec(frozenset(members), frozenset(items)))
        for u in members:
            interests[u].update(items)
        prev = members
    if user_extra_items:
        pool = np.arange(n_common, eta)
        for u in range(mu):
            interests[u].update(rng.choice(pool, size=user_extra_items, replace=False).tolist())
    for u in range(mu):
        if not interests[u]:
            raise InfeasibleScenarioError(f"user {u} likes nothing; set user_extra_items > 0")
    return Scenario(mu, eta, tuple(sigs), tuple(interests), lambda_target)


def reference_scenario(seed: int = 0) -> Scenario:
    """One SIG of 20 users, 10 common items, 20 extras each, catalog of 1000."""
    return build_scenario(1, 20, 10, 20, eta=1000, mu=20, rng=seed)


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def dumps_scenario(s: Scenario) -> str:
    cp = configparser.ConfigParser()
    cp["scenario"] = {"eta": str(s.eta), "mu": str(s.mu), "lambda_target": repr(s.lambda_target)}
    for i, sig in enumerate(s.sigs):
        cp[f"sig.{i}"] = {
            "members": " ".join(map(str, sorted(sig.members))),
            "common_items": " ".join(map(str, sorted(sig.common_items))),
        }
    cp["users"] = {str(u): " ".join(map(str, sorted(p))) for u, p in enumerate(s.user_interests)}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def loads_scenario(text: str) -> Scenario:
    """Parse scenario text.

    Raises
    ------
    ScenarioParseError
        Malformed text, missing keys, or a scenario violating its invariants.
    """
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
        if cp.has_section("generate"):
            g = cp["generate"]
            return build_scenario(
                ell=g.getint("ell"),
                sig_sizes=_scalar_or_list(g["sig_sizes"]),
                sig_common_sizes=_scalar_or_list(g["sig_common_sizes"]),
                user_extra_items=g.getint("user_extra_items"),
                eta=g.getint("eta"),
                mu=g.getint("mu"),
                overlap=g.getint("overlap", 0),
                lambda_target=g.getfloat("lambda_target", 1.0),
                rng=g.getint("seed", 0),
            )
        head = cp["scenario"]
        mu, eta = head.getint("mu"), head.getint("eta")
        if mu is None or eta is None:
            raise ScenarioParseError("[scenario] needs eta and mu")
        sig_sections = sorted(
            (sec for sec in cp.sections() if sec.startswith("sig.")), key=lambda sec: int(sec[4:])
        )
        sigs = [SIGSpec(_ints(cp[sec]["members"]), _ints(cp[sec]["common_items"])) for sec in sig_sections]
        users = cp["users"]
        interests = [frozenset(_ints(users.get(str(u), ""))) for u in range(mu)]
        return Scenario(mu, eta, tuple(sigs), tuple(interests), head.getfloat("lambda_target", 1.0))
    except ScenarioParseError:
        raise
    except (configparser.Error, KeyError, ValueError) as exc:
        raise ScenarioParseError(str(exc)) from exc


def _scalar_or_list(text: str):
    vals = _ints(text)
    return vals[0] if len(vals) == 1 else vals


def save_scenario(s: Scenario, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_scenario(s))


def load_scenario(path: str) -> Scenario:
    try:
        with open(path) as fh:
            return loads_scenario(fh.read())
    except OSError as exc:
        raise ScenarioParseError(str(exc)) from exc
