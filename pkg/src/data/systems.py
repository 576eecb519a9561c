"""Voting systems: weighted (threshold) rules and explicit winning families.

A weighted system wins with coalition A iff sum of w(v) over A >= q (ties at the
quota win). Weights and quota are exact rationals, and a relative quota r
becomes the absolute quota r * (total weight) with no rounding.

Explicit families are only for small N; they are what the invariance
detection works on.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce, singledispatch
from typing import Iterable

from src.config import Settings, load_settings
from src.data.rationals import as_rational
from src.errors import CapExceededError, DomainError, StructureError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightedVotingSystem:
    """Voter weights w_i >= 0 and quota 0 < q <= sum of weights."""

    weights: tuple[Fraction, ...]
    quota: Fraction

    def __post_init__(self):
        weights = tuple(as_rational(w, "weight") for w in self.weights)
        quota = as_rational(self.quota, "quota")
        if not weights:
            raise StructureError("A voting system needs at least one voter")
        if any(w < 0 for w in weights):
            raise StructureError(f"Weights must be non-negative: {[str(w) for w in weights]}")
        total = sum(weights, Fraction(0))
        if total <= 0:
            raise StructureError("Total weight must be positive")
        if not 0 < quota <= total:
            raise StructureError(f"Quota must satisfy 0 < q <= {total}, got {quota}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "quota", quota)

    @classmethod
    def from_relative_quota(cls, weights: Iterable, relative_quota) -> WeightedVotingSystem:
        """q = r * total weight, computed exactly."""
        weights = tuple(as_rational(w, "weight") for w in weights)
        r = as_rational(relative_quota, "relative quota")
        if not 0 < r <= 1:
            raise DomainError(f"Relative quota must lie in (0, 1], got {r}")
        return cls(weights, r * sum(weights, Fraction(0)))

    @property
    def n_voters(self) -> int:
        return len(self.weights)

    @property
    def total_weight(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def relative_quota(self) -> Fraction:
        return self.quota / self.total_weight

    def integer_form(self) -> tuple[tuple[int, ...], int]:
        """Weights and quota scaled by the LCM of all denominators."""
        scale = reduce(math.lcm, (w.denominator for w in self.weights), self.quota.denominator)
        weights = tuple(int(w * scale) for w in self.weights)
        return weights, int(self.quota * scale)

    def has_unit_weights(self) -> bool:
        """True when all voters carry the same (positive) weight."""
        return len(set(self.weights)) == 1

    def label(self) -> str:
        weights = ",".join(str(w) for w in self.weights)
        if len(weights) > 60:
            weights = f"{self.n_voters} voters"
        return f"weighted[{weights}; q={self.quota}]"


@dataclass(frozen=True)
class ExplicitVotingSystem:
    """Voters 0..N-1 and an explicit monotone family of winning coalitions."""

    n_voters: int
    winning: frozenset[frozenset[int]]
    settings: Settings | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n = self.n_voters
        _check_explicit_size(n, self.settings)

        winning = frozenset(frozenset(_check_coalition(c, n)) for c in self.winning)
        grand = frozenset(range(n))
        if grand not in winning:
            raise StructureError("The grand coalition must be winning")
        if frozenset() in winning:
            raise StructureError("The empty coalition must be losing")
        for coalition in winning:
            for v in grand - coalition:
                if coalition | {v} not in winning:
                    raise StructureError(
                        f"Family is not monotone: {sorted(coalition)} wins "
                        f"but {sorted(coalition | {v})} does not"
                    )
        object.__setattr__(self, "winning", winning)

    @classmethod
    def from_weighted(
        cls, system: WeightedVotingSystem, settings: Settings | None = None
    ) -> ExplicitVotingSystem:
        """Enumerate the winning family of a weighted system."""
        n = system.n_voters
        _check_explicit_size(n, settings)
        winning = frozenset(
            frozenset(c)
            for size in range(n + 1)
            for c in itertools.combinations(range(n), size)
            if is_winning(system, c)
        )
        return cls(n, winning, settings)

    @classmethod
    def upward_closure(
        cls,
        n_voters: int,
        generators: Iterable[Iterable[int]],
        settings: Settings | None = None,
    ) -> ExplicitVotingSystem:
        """Family of all supersets of the given coalitions."""
        _check_explicit_size(n_voters, settings)
        gens = [frozenset(_check_coalition(g, n_voters)) for g in generators]
        winning = frozenset(
            frozenset(c)
            for size in range(n_voters + 1)
            for c in itertools.combinations(range(n_voters), size)
            if any(g.issubset(c) for g in gens)
        )
        return cls(n_voters, winning, settings)

    def label(self) -> str:
        return f"explicit[N={self.n_voters}; {len(self.winning)} winning]"


def _check_explicit_size(n_voters: int, settings: Settings | None) -> None:
    # runs before any 2^N enumeration
    if isinstance(n_voters, bool) or not isinstance(n_voters, int) or n_voters < 1:
        raise StructureError(f"Voter count must be a positive integer, got {n_voters!r}")
    cap = (settings or load_settings()).explicit_max_voters
    if n_voters > cap:
        raise CapExceededError(f"Explicit families are limited to N <= {cap}, got N={n_voters}")


def _check_coalition(coalition: Iterable[int], n_voters: int) -> set[int]:
    members = set(coalition)
    for v in members:
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < n_voters:
            raise DomainError(f"Voter index {v!r} out of range 0..{n_voters - 1}")
    return members


def weight_of(system: WeightedVotingSystem, coalition: Iterable[int]) -> Fraction:
    members = _check_coalition(coalition, system.n_voters)
    return sum((system.weights[v] for v in members), Fraction(0))


@singledispatch
def is_winning(system, coalition: Iterable[int]) -> bool:
    """Whether ``coalition`` (0-based voter indices) is winning in ``system``."""
    raise TypeError(f"Unsupported voting system type {type(system).__name__}")


@is_winning.register
def _(system: WeightedVotingSystem, coalition: Iterable[int]) -> bool:
    return weight_of(system, coalition) >= system.quota


@is_winning.register
def _(system: ExplicitVotingSystem, coalition: Iterable[int]) -> bool:
    return frozenset(_check_coalition(coalition, system.n_voters)) in system.winning


def simple_majority(n_voters: int) -> WeightedVotingSystem:
    """Unit weights, q = (N + 1) / 2: winning iff more than half the voters."""
    if isinstance(n_voters, bool) or not isinstance(n_voters, int) or n_voters < 1:
        raise DomainError(f"Simple majority needs N >= 1, got {n_voters!r}")
    return WeightedVotingSystem((Fraction(1),) * n_voters, Fraction(n_voters + 1, 2))


def unit_weight_system(n_voters: int, relative_quota) -> WeightedVotingSystem:
    """Simple (unit weight) system with relative quota r."""
    if isinstance(n_voters, bool) or not isinstance(n_voters, int) or n_voters < 1:
        raise DomainError(f"Need N >= 1, got {n_voters!r}")
    return WeightedVotingSystem.from_relative_quota((1,) * n_voters, relative_quota)


def laakso_taagepera(weights: Iterable) -> Fraction:
    """LT_N = (sum of w_n^2) / (sum of w_n)^2, in (0, 1]; 1/N for equal weights."""
    weights = [as_rational(w, "weight") for w in weights]
    if any(w < 0 for w in weights):
        raise StructureError("Weights must be non-negative")
    total = sum(weights, Fraction(0))
    if total <= 0:
        raise StructureError("Laakso-Taagepera index needs a positive total weight")
    return sum((w * w for w in weights), Fraction(0)) / (total * total)


def detect_invariant(system: ExplicitVotingSystem) -> WeightedVotingSystem | None:
    """Equivalent unit-weight system when winning depends on coalition size only.

    For each size k, all C(N, k) coalitions must agree on their status; the
    quota is then the smallest size whose coalitions all win.
    """
    n = system.n_voters
    winning_by_size = Counter(len(c) for c in system.winning)
    quota = None
    for k in range(n + 1):
        count = winning_by_size.get(k, 0)
        if count not in (0, math.comb(n, k)):
            logger.debug("Size %d splits: %d of %d coalitions win", k, count, math.comb(n, k))
            return None
        if count and quota is None:
            quota = k
    return WeightedVotingSystem((Fraction(1),) * n, Fraction(quota))
