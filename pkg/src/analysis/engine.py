"""Exact decisiveness, success and efficiency under an exchangeable measure.

Every quantity is the probability of an event that is a union of coalitions,
and under an exchangeable measure a coalition's probability depends only on
its size. So each quantity reduces to

    sum over k of  (number of event coalitions of size k) * w_N(k)

The counts come from a coalition DP with state (size, accumulated weight)
over all voters except the focal one. Voters are grouped by weight: a class
of m voters of weight w enters the DP as (1 + x y^w)^m, i.e. with binomial
multiplicities. Voters of equal weight have identical profiles, so one DP per
distinct weight covers everybody.

D^- is never counted separately: A -> A + {v} maps winning-decisive
coalitions of size k one-to-one onto losing-decisive coalitions of size
k + 1, so D^-(v) = sum of swing_plus(k) * w_N(k + 1).

``brute_force_analyze`` enumerates all 2^N coalitions and classifies each one
directly against the definitions. It is the oracle the DP is tested against.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
import pandas as pd

from src.config import Settings, load_settings
from src.data.measures import BeliefMeasure, Kernel, kernel, validate_reflection
from src.data.systems import ExplicitVotingSystem, WeightedVotingSystem
from src.errors import CapExceededError, DomainError, ResourceError, SymmetryError

logger = logging.getLogger(__name__)

QUANTITIES = ("DPlus", "DMinus", "D", "SPlus", "SMinus", "S", "E")


@dataclass(frozen=True)
class SizeProfile:
    """Per-size coalition counts for one focal voter.

    swing_plus[k]    A not containing v, |A| = k, A losing, A + {v} winning
    win_with[k]      A containing v, |A| = k, A winning
    lose_without[k]  A not containing v, |A| = k, A losing
    win_all[k]       A of size k winning (does not depend on v)
    """

    n_voters: int
    voter: int
    win_all: tuple[int, ...]
    swing_plus: tuple[int, ...]
    win_with: tuple[int, ...]
    lose_without: tuple[int, ...]

    @property
    def swing_minus(self) -> tuple[int, ...]:
        """Losing-decisive counts indexed by |A + {v}|."""
        return (0, *self.swing_plus[:-1])

    @property
    def swing_count(self) -> int:
        return sum(self.swing_plus)


@dataclass(frozen=True)
class VoterPower:
    voter: int
    d_plus: Fraction
    d_minus: Fraction
    s_plus: Fraction
    s_minus: Fraction

    @property
    def d(self) -> Fraction:
        return self.d_plus + self.d_minus

    @property
    def s(self) -> Fraction:
        return self.s_plus + self.s_minus

    def value(self, quantity: str) -> Fraction:
        return {
            "DPlus": self.d_plus,
            "DMinus": self.d_minus,
            "D": self.d,
            "SPlus": self.s_plus,
            "SMinus": self.s_minus,
            "S": self.s,
        }[quantity]


@dataclass(frozen=True)
class PowerReport:
    """Decisiveness and success for every voter plus the system's efficiency."""

    voters: tuple[VoterPower, ...]
    efficiency: Fraction
    system_id: str
    measure_id: str

    def __post_init__(self):
        for vp in self.voters:
            for q in QUANTITIES[:-1]:
                if not 0 <= vp.value(q) <= 1:
                    raise ValueError(f"{q} of voter {vp.voter} outside [0, 1]: {vp.value(q)}")
        if not 0 <= self.efficiency <= 1:
            raise ValueError(f"Efficiency outside [0, 1]: {self.efficiency}")

    def value(self, quantity: str, voter: int = 0) -> Fraction:
        if quantity == "E":
            return self.efficiency
        return self.voters[voter].value(quantity)

    def to_frame(self) -> pd.DataFrame:
        """One row per voter (1-based), columns in the CSV header order."""
        rows = [
            {
                "voter": vp.voter + 1,
                **{q: vp.value(q) for q in QUANTITIES[:-1]},
                "E": self.efficiency,
            }
            for vp in self.voters
        ]
        return pd.DataFrame(rows, columns=["voter", *QUANTITIES])

    def as_floats(self) -> pd.DataFrame:
        df = self.to_frame()
        df[list(QUANTITIES)] = df[list(QUANTITIES)].map(float)
        return df


def _require_voting_measure(mu: BeliefMeasure, require_symmetric: bool) -> None:
    if require_symmetric and not validate_reflection(mu):
        raise SymmetryError(
            f"Measure {mu.name} is not reflection symmetric about 1/2, "
            "so it is not a voting measure"
        )


def _estimate_states(class_sizes: Counter, n_voters: int, total_weight: int) -> int:
    product = 1
    for m in class_sizes.values():
        product *= m + 1
    return min(product, (n_voters + 1) * (total_weight + 1))


def check_dp_budget(system: WeightedVotingSystem, settings: Settings | None = None) -> None:
    """Raise if the exact DP for ``system`` would exceed the configured caps."""
    settings = settings or load_settings()
    weights, _ = system.integer_form()
    n = system.n_voters
    if system.has_unit_weights():
        if n > settings.unit_weight_max_voters:
            raise CapExceededError(
                f"Unit-weight systems are limited to N <= {settings.unit_weight_max_voters}, "
                f"got N={n}"
            )
        return
    states = _estimate_states(Counter(weights), n, sum(weights))
    if states > settings.dp_state_budget:
        raise ResourceError(
            f"Coalition DP needs about {states:,} (size, weight) states, above the budget of "
            f"{settings.dp_state_budget:,}. Use brute_force_analyze for N <= "
            f"{settings.brute_force_max_voters} or montecarlo.estimate instead."
        )


def _coalition_counts(class_sizes: dict[int, int]) -> dict[tuple[int, int], int]:
    """Number of coalitions with each (size, weight), by weight class."""
    table: dict[tuple[int, int], int] = {(0, 0): 1}
    for weight, multiplicity in sorted(class_sizes.items()):
        binoms = [math.comb(multiplicity, j) for j in range(multiplicity + 1)]
        grown: dict[tuple[int, int], int] = defaultdict(int)
        for (size, total), count in table.items():
            for j, b in enumerate(binoms):
                grown[(size + j, total + j * weight)] += count * b
        table = grown
    return table


def _profile_for_weight(
    weights: tuple[int, ...], quota: int, voter: int
) -> SizeProfile:
    n = len(weights)
    focal = weights[voter]
    others = Counter(weights)
    others[focal] -= 1
    if others[focal] == 0:
        del others[focal]

    win_all = [0] * (n + 1)
    swing_plus = [0] * (n + 1)
    win_with = [0] * (n + 1)
    lose_without = [0] * (n + 1)

    for (size, total), count in _coalition_counts(dict(others)).items():
        losing = total < quota
        wins_with_v = total + focal >= quota
        if wins_with_v:
            win_with[size + 1] += count
            win_all[size + 1] += count
        if losing:
            lose_without[size] += count
            if wins_with_v:
                swing_plus[size] += count
        else:
            win_all[size] += count

    return SizeProfile(
        n_voters=n,
        voter=voter,
        win_all=tuple(win_all),
        swing_plus=tuple(swing_plus),
        win_with=tuple(win_with),
        lose_without=tuple(lose_without),
    )


def size_profile(
    system: WeightedVotingSystem, voter: int, settings: Settings | None = None
) -> SizeProfile:
    """Exact per-size event counts for ``voter`` (0-based)."""
    if not 0 <= voter < system.n_voters:
        raise DomainError(f"Voter index {voter} out of range 0..{system.n_voters - 1}")
    check_dp_budget(system, settings)
    weights, quota = system.integer_form()
    return _profile_for_weight(weights, quota, voter)


def _weighted_sum(counts: tuple[int, ...], kern: Kernel, shift: int = 0) -> Fraction:
    n = kern.n_voters
    total = Fraction(0)
    for k, c in enumerate(counts):
        if c and k + shift <= n:
            total += c * kern[k + shift]
    return total


def _voter_power(profile: SizeProfile, kern: Kernel, voter: int) -> VoterPower:
    return VoterPower(
        voter=voter,
        d_plus=_weighted_sum(profile.swing_plus, kern),
        d_minus=_weighted_sum(profile.swing_plus, kern, shift=1),
        s_plus=_weighted_sum(profile.win_with, kern),
        s_minus=_weighted_sum(profile.lose_without, kern),
    )


def analyze(
    system: WeightedVotingSystem,
    mu: BeliefMeasure,
    *,
    settings: Settings | None = None,
    workers: int = 1,
    require_symmetric: bool = True,
) -> PowerReport:
    """Exact D+/D-/D, S+/S-/S per voter and efficiency E under P_mu."""
    settings = settings or load_settings()
    _require_voting_measure(mu, require_symmetric)
    check_dp_budget(system, settings)

    weights, quota = system.integer_form()
    n = system.n_voters
    kern = kernel(mu, n)

    representatives: dict[int, int] = {}
    for v, w in enumerate(weights):
        representatives.setdefault(w, v)

    if workers > 1 and len(representatives) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                w: pool.submit(_profile_for_weight, weights, quota, v)
                for w, v in representatives.items()
            }
            profiles = {w: f.result() for w, f in futures.items()}
    else:
        profiles = {w: _profile_for_weight(weights, quota, v) for w, v in representatives.items()}
    logger.debug("Built %d size profiles for %d voters", len(profiles), n)

    by_weight = {w: _voter_power(p, kern, p.voter) for w, p in profiles.items()}
    voters = tuple(replace(by_weight[w], voter=v) for v, w in enumerate(weights))
    any_profile = next(iter(profiles.values()))
    efficiency = _weighted_sum(any_profile.win_all, kern)

    logger.info("Analysed %s under %s: E=%s", system.label(), mu.name, efficiency)
    return PowerReport(voters, efficiency, system.label(), mu.name)


def _winning_table(system: WeightedVotingSystem | ExplicitVotingSystem) -> np.ndarray:
    """Boolean array indexed by coalition bitmask (bit v set iff voter v in A)."""
    n = system.n_voters
    if isinstance(system, ExplicitVotingSystem):
        win = np.zeros(1 << n, dtype=bool)
        for coalition in system.winning:
            win[sum(1 << v for v in coalition)] = True
        return win

    weights, quota = system.integer_form()
    dtype = np.int64 if sum(weights) < 2**62 else object
    totals = np.zeros(1, dtype=dtype)
    for w in weights:
        totals = np.concatenate([totals, totals + w])
    return totals >= quota


def brute_force_analyze(
    system: WeightedVotingSystem | ExplicitVotingSystem,
    mu: BeliefMeasure,
    *,
    settings: Settings | None = None,
    require_symmetric: bool = True,
) -> PowerReport:
    """Enumerate all 2^N coalitions and classify each against the definitions."""
    settings = settings or load_settings()
    n = system.n_voters
    if n > settings.brute_force_max_voters:
        raise CapExceededError(
            f"Brute force is limited to N <= {settings.brute_force_max_voters}, got N={n}"
        )
    _require_voting_measure(mu, require_symmetric)
    kern = kernel(mu, n)

    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.zeros(1 << n, dtype=np.int64)
    for v in range(n):
        sizes += (masks >> v) & 1
    win = _winning_table(system)

    def mass(selected: np.ndarray) -> Fraction:
        counts = np.bincount(sizes[selected], minlength=n + 1)
        return sum((int(c) * kern[k] for k, c in enumerate(counts) if c), Fraction(0))

    voters = []
    for v in range(n):
        bit = 1 << v
        has_v = (masks & bit) != 0
        toggled = masks ^ bit
        # Def: D+(v) = {A : v not in A, A losing, A + v winning}
        d_plus = ~has_v & ~win & win[toggled]
        # Def: D-(v) = {A : v in A, A winning, A - v losing}
        d_minus = has_v & win & ~win[toggled]
        s_plus = has_v & win
        s_minus = ~has_v & ~win
        voters.append(VoterPower(v, mass(d_plus), mass(d_minus), mass(s_plus), mass(s_minus)))

    efficiency = mass(win)
    logger.info("Brute-force analysed %s under %s", system.label(), mu.name)
    return PowerReport(tuple(voters), efficiency, system.label(), mu.name)
