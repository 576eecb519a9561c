"""Monte Carlo estimates of decisiveness, success and efficiency.

Profiles are drawn from P_mu in two stages: p ~ mu, then N independent votes
that are "yes" with probability p. Sample i uses its own Philox substream
(key = seed, sample index in the high counter words), so a run gives the same
counts whether the samples are processed serially or split across workers.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.data.measures import Atom, BeliefMeasure
from src.data.systems import WeightedVotingSystem
from src.errors import DomainError

logger = logging.getLogger(__name__)

MC_QUANTITIES = ("DPlus", "DMinus", "D", "SPlus", "SMinus", "S", "E", "Losing")

CHUNK_SIZE = 10_000


@dataclass(frozen=True)
class EstimateReport:
    """Sample mean of one event indicator with its binomial standard error."""

    quantity: str
    voter: int
    estimate: float
    standard_error: float
    samples: int
    seed: int
    hits: int

    def within(self, exact, n_se: float = 4.0) -> bool:
        """Whether ``exact`` lies within ``n_se`` standard errors of the estimate."""
        return abs(self.estimate - float(exact)) <= n_se * self.standard_error


def estimates_frame(reports: list[EstimateReport]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "quantity": r.quantity,
                "voter": r.voter + 1,
                "estimate": r.estimate,
                "standard_error": r.standard_error,
                "samples": r.samples,
                "seed": r.seed,
            }
            for r in reports
        ],
        columns=["quantity", "voter", "estimate", "standard_error", "samples", "seed"],
    )


def substream(seed: int, index: int) -> np.random.Generator:
    """Generator for sample ``index``; independent of how samples are batched."""
    if seed < 0:
        raise DomainError(f"Seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed, counter=index << 128))


@dataclass(frozen=True)
class _Sampler:
    """mu flattened into cumulative masses for categorical draws."""

    components: tuple
    cumulative: np.ndarray

    @classmethod
    def from_measure(cls, mu: BeliefMeasure) -> _Sampler:
        components = tuple(mu.components())
        # exact partial sums, converted only for the comparison with the uniform draw
        cumulative = list(accumulate((c.mass for c in components), initial=Fraction(0)))[1:]
        return cls(components, np.array([float(c) for c in cumulative]))

    def draw_p(self, rng: np.random.Generator) -> float:
        u = rng.random()
        idx = min(int(np.searchsorted(self.cumulative, u, side="right")), len(self.components) - 1)
        component = self.components[idx]
        if isinstance(component, Atom):
            return float(component.location)
        lower, upper = float(component.lower), float(component.upper)
        return lower + (upper - lower) * rng.random()

    def draw(self, n_voters: int, rng: np.random.Generator) -> np.ndarray:
        p = self.draw_p(rng)
        return rng.random(n_voters) < p


def sample_profile(mu: BeliefMeasure, n_voters: int, rng: np.random.Generator) -> np.ndarray:
    """One vote vector (True = yes) of length N drawn from P_mu."""
    if n_voters < 1:
        raise DomainError(f"Need a positive voter count, got {n_voters}")
    return _Sampler.from_measure(mu).draw(n_voters, rng)


def _event_flags(yes: np.ndarray, weights: np.ndarray, quota: int, voter: int) -> dict[str, bool]:
    total = int(weights[yes].sum())
    wins = total >= quota
    in_v = bool(yes[voter])
    w_v = int(weights[voter])
    d_plus = not in_v and not wins and total + w_v >= quota
    d_minus = in_v and wins and total - w_v < quota
    s_plus = in_v and wins
    s_minus = not in_v and not wins
    return {
        "DPlus": d_plus,
        "DMinus": d_minus,
        "D": d_plus or d_minus,
        "SPlus": s_plus,
        "SMinus": s_minus,
        "S": s_plus or s_minus,
        "E": wins,
        "Losing": not wins,
    }


def _count_events(
    mu: BeliefMeasure,
    weights: tuple[int, ...],
    quota: int,
    voter: int,
    seed: int,
    start: int,
    stop: int,
) -> Counter:
    sampler = _Sampler.from_measure(mu)
    dtype = np.int64 if sum(weights) < 2**62 else object
    w = np.array(weights, dtype=dtype)
    counts: Counter = Counter()
    for index in range(start, stop):
        yes = sampler.draw(len(weights), substream(seed, index))
        for name, hit in _event_flags(yes, w, quota, voter).items():
            counts[name] += int(hit)
    return counts


def estimate(
    system: WeightedVotingSystem,
    mu: BeliefMeasure,
    quantities=MC_QUANTITIES,
    samples: int = 100_000,
    seed: int = 42,
    *,
    voter: int = 0,
    workers: int = 1,
    progress: bool = False,
) -> list[EstimateReport]:
    """Estimate event probabilities for ``voter`` (0-based) from ``samples`` profiles.

    mu need not be reflection symmetric here.
    """
    unknown = [q for q in quantities if q not in MC_QUANTITIES]
    if unknown:
        raise DomainError(f"Unknown quantities {unknown}; expected a subset of {MC_QUANTITIES}")
    if samples < 1:
        raise DomainError(f"Need at least one sample, got {samples}")
    if not 0 <= voter < system.n_voters:
        raise DomainError(f"Voter index {voter} out of range 0..{system.n_voters - 1}")

    weights, quota = system.integer_form()
    chunks = [(s, min(s + CHUNK_SIZE, samples)) for s in range(0, samples, CHUNK_SIZE)]
    counts: Counter = Counter()

    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_count_events, mu, weights, quota, voter, seed, start, stop)
                for start, stop in chunks
            ]
            for future in tqdm(futures, desc="Sampling", disable=not progress):
                counts.update(future.result())
    else:
        for start, stop in tqdm(chunks, desc="Sampling", disable=not progress):
            counts.update(_count_events(mu, weights, quota, voter, seed, start, stop))

    reports = []
    for q in quantities:
        hits = counts[q]
        p_hat = hits / samples
        reports.append(
            EstimateReport(
                quantity=q,
                voter=voter,
                estimate=p_hat,
                standard_error=math.sqrt(p_hat * (1 - p_hat) / samples),
                samples=samples,
                seed=seed,
                hits=hits,
            )
        )
    logger.info(
        "Sampled %d profiles for %s under %s (seed %d)", samples, system.label(), mu.name, seed
    )
    return reports
