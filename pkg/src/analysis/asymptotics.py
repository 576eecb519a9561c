"""Closed forms, large-N limits and concentration bounds for unit-weight systems.

For a simple (unit weight) system with relative quota r, a coalition wins iff
|A| >= c with c = ceil(r N) (q = r N exactly, so c = r N when r N is an integer).
Under the Shapley-Shubik measure every size class has probability 1/(N + 1),
which gives exact finite-N formulas; with M = c - 1,

    S+ = 1/2 - M (M + 1) / (2 N (N + 1))
    S- = 1/2 - (N - c)(N - c + 1) / (2 N (N + 1))
    E  = (N - c + 1) / (N + 1)

Under the Penrose-Banzhaf measure the same events are binomial tails. The
Hoeffding-type bounds here are the ones the large-N statements rest on;
``convergence_table`` lines up exact engine values against limits and bounds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
import pandas as pd
from scipy.special import gammaln
from tqdm import tqdm

from src.analysis.engine import QUANTITIES, analyze
from src.config import Settings, load_settings
from src.data.measures import (
    BeliefMeasure,
    penrose_banzhaf,
    shapley_shubik,
    tail_integrals,
)
from src.data.rationals import as_rational
from src.data.systems import laakso_taagepera, simple_majority, unit_weight_system
from src.errors import DomainError

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _check_n(n_voters: int) -> None:
    if isinstance(n_voters, bool) or not isinstance(n_voters, int) or n_voters < 1:
        raise DomainError(f"Need a positive voter count, got {n_voters!r}")


def _check_open_unit(r: Fraction, name: str = "r") -> None:
    if not 0 < r < 1:
        raise DomainError(f"{name} must lie in (0, 1), got {r}")


def winning_size(n_voters: int, relative_quota) -> int:
    """Smallest winning coalition size c = ceil(r N) for unit weights."""
    return math.ceil(as_rational(relative_quota, "r") * n_voters)


# ── Exact finite-N formulas ─────────────────────────────────────────────


@dataclass(frozen=True)
class ClosedForms:
    """Exact Shapley-Shubik values for unit weights at one (N, r)."""

    n_voters: int
    relative_quota: Fraction
    success_cut: int  # M = ceil(rN) - 1
    majority_s_plus: Fraction
    majority_s_minus: Fraction
    majority_s: Fraction
    s_plus: Fraction
    s_minus: Fraction
    s: Fraction
    efficiency: Fraction
    d_plus: Fraction
    d_minus: Fraction
    d: Fraction


def _majority_success(n: int) -> tuple[Fraction, Fraction]:
    if n % 2:
        s_plus = Fraction(3, 8) + Fraction(1, 8 * n)
        s_minus = s_plus
    else:
        s_plus = Fraction(3, 8) - Fraction(1, 8 * (n + 1))
        s_minus = Fraction(3, 8) + Fraction(3, 8 * (n + 1))
    return s_plus, s_minus


def closed_forms(n_voters: int, relative_quota) -> ClosedForms:
    """Shapley-Shubik success, efficiency and decisiveness for unit weights."""
    _check_n(n_voters)
    r = as_rational(relative_quota, "r")
    _check_open_unit(r)
    n = n_voters
    c = winning_size(n, r)
    m = c - 1
    denom = 2 * n * (n + 1)

    s_plus = HALF - Fraction(m * (m + 1), denom)
    s_minus = HALF - Fraction((n - c) * (n - c + 1), denom)
    maj_plus, maj_minus = _majority_success(n)
    d_plus = Fraction(n - c + 1, n * (n + 1))
    d_minus = Fraction(c, n * (n + 1))

    return ClosedForms(
        n_voters=n,
        relative_quota=r,
        success_cut=m,
        majority_s_plus=maj_plus,
        majority_s_minus=maj_minus,
        majority_s=maj_plus + maj_minus,
        s_plus=s_plus,
        s_minus=s_minus,
        s=s_plus + s_minus,
        efficiency=shapley_efficiency(n, r * n),
        d_plus=d_plus,
        d_minus=d_minus,
        d=d_plus + d_minus,
    )


def shapley_efficiency(n_voters: int, quota) -> Fraction:
    """E_S = (N - ceil(q) + 1) / (N + 1) for unit weights and quota q."""
    _check_n(n_voters)
    q = as_rational(quota, "quota")
    if not 0 < q <= n_voters:
        raise DomainError(f"Quota must satisfy 0 < q <= N, got {q}")
    return Fraction(n_voters - math.ceil(q) + 1, n_voters + 1)


def _binomial_tail_half(trials: int, at_least: int) -> Fraction:
    """P(Bin(trials, 1/2) >= at_least), exactly."""
    at_least = max(at_least, 0)
    if at_least > trials:
        return Fraction(0)
    count = sum(math.comb(trials, j) for j in range(at_least, trials + 1))
    return Fraction(count, 2**trials)


def banzhaf_efficiency(n_voters: int, relative_quota) -> Fraction:
    """E_B = P(Bin(N, 1/2) >= ceil(rN)) for unit weights."""
    _check_n(n_voters)
    return _binomial_tail_half(n_voters, winning_size(n_voters, relative_quota))


def banzhaf_affirmative_success(n_voters: int, relative_quota) -> Fraction:
    """S_B+ = 1/2 P(Bin(N - 1, 1/2) >= ceil(rN) - 1) for unit weights."""
    _check_n(n_voters)
    c = winning_size(n_voters, relative_quota)
    return HALF * _binomial_tail_half(n_voters - 1, c - 1)


def banzhaf_decisiveness(
    n_voters: int, relative_quota, settings: Settings | None = None
) -> Fraction | float:
    """D_B = C(N - 1, c - 1) / 2^(N - 1) for unit weights, c = ceil(rN).

    Exact below the configured threshold; above it the central binomial term
    is evaluated through log-Gamma, which is all the ratio to the asymptote
    needs.
    """
    _check_n(n_voters)
    settings = settings or load_settings()
    n = n_voters
    c = winning_size(n, relative_quota)
    if not 1 <= c <= n:
        return Fraction(0)
    if n < settings.exact_binomial_below:
        return Fraction(math.comb(n - 1, c - 1), 2 ** (n - 1))
    log_value = gammaln(n) - gammaln(c) - gammaln(n - c + 1) - (n - 1) * np.log(2.0)
    return float(np.exp(log_value))


# ── Limits ──────────────────────────────────────────────────────────────


def db_approx(n_voters: float) -> float:
    """2 / sqrt(2 pi N): Penrose-Banzhaf decisiveness under simple majority."""
    return float(2.0 / np.sqrt(2.0 * np.pi * n_voters))


def sb_approx(n_voters: float) -> float:
    """1/2 + 1 / sqrt(2 pi N): Penrose-Banzhaf success under simple majority."""
    return float(0.5 + 1.0 / np.sqrt(2.0 * np.pi * n_voters))


def _three_way(r: Fraction, below, at, above):
    if r < HALF:
        return below
    if r == HALF:
        return at
    return above


def shapley_success_limit(r) -> Fraction:
    """1 - (r^2 + (1 - r)^2) / 2 on the closed interval [0, 1]; 3/4 at r = 1/2."""
    r = as_rational(r, "r")
    if not 0 <= r <= 1:
        raise DomainError(f"r must lie in [0, 1], got {r}")
    return 1 - (r * r + (1 - r) * (1 - r)) / 2


@dataclass(frozen=True)
class LimitValues:
    """N -> infinity values at relative quota r (unit weights unless noted)."""

    relative_quota: Fraction
    banzhaf_efficiency: Fraction
    banzhaf_s_plus: Fraction
    banzhaf_s_minus: Fraction
    banzhaf_s: Fraction
    shapley_efficiency: Fraction
    shapley_s_plus: Fraction
    shapley_s_minus: Fraction
    shapley_s: Fraction
    db_approx: Callable[[float], float] = field(default=db_approx, repr=False)
    sb_approx: Callable[[float], float] = field(default=sb_approx, repr=False)
    # common-belief limits for weighted systems with LT_N -> 0; None without mu
    belief_efficiency: Fraction | None = None
    belief_s_plus: Fraction | None = None
    belief_s_minus: Fraction | None = None
    atom_at_r: Fraction | None = None

    @property
    def belief_s(self) -> Fraction | None:
        if self.belief_s_plus is None:
            return None
        return self.belief_s_plus + self.belief_s_minus


def limits(relative_quota, mu: BeliefMeasure | None = None) -> LimitValues:
    """Large-N limits of efficiency and success at relative quota r."""
    r = as_rational(relative_quota, "r")
    _check_open_unit(r)

    s_plus = HALF - r * r / 2
    s_minus = HALF - (1 - r) * (1 - r) / 2
    values = dict(
        relative_quota=r,
        banzhaf_efficiency=_three_way(r, Fraction(1), HALF, Fraction(0)),
        banzhaf_s_plus=_three_way(r, HALF, Fraction(1, 4), Fraction(0)),
        banzhaf_s_minus=_three_way(r, Fraction(0), Fraction(1, 4), HALF),
        banzhaf_s=HALF,
        shapley_efficiency=1 - r,
        shapley_s_plus=s_plus,
        shapley_s_minus=s_minus,
        shapley_s=s_plus + s_minus,
    )
    if mu is not None:
        tails = tail_integrals(mu, r)
        values.update(
            belief_efficiency=tails.mass_tail,
            belief_s_plus=tails.first_moment_tail,
            belief_s_minus=tails.complement_moment_tail,
            atom_at_r=tails.atom_at_r,
        )
    return LimitValues(**values)


# ── Bounds ──────────────────────────────────────────────────────────────


def hoeffding(deviation: float, sigma_sq: float) -> float:
    """exp(-2 lambda^2 / sigma^2): one-sided Hoeffding bound for a sum deviation lambda."""
    if deviation < 0:
        raise DomainError(f"Deviation must be non-negative, got {deviation}")
    if sigma_sq <= 0:
        raise DomainError(f"sigma^2 must be positive, got {sigma_sq}")
    return float(np.exp(-2.0 * float(deviation) ** 2 / float(sigma_sq)))


def pweight(alpha: float, weights: Iterable) -> float:
    """2 exp(-2 alpha^2 / LT_N): two-sided bound on a weighted vote share deviation."""
    if alpha < 0:
        raise DomainError(f"alpha must be non-negative, got {alpha}")
    lt = laakso_taagepera(weights)
    return float(2.0 * np.exp(-2.0 * float(alpha) ** 2 / float(lt)))


def chebyshev_weight(alpha: float, p: float, weights: Iterable) -> float:
    """p (1 - p) LT_N / alpha^2: second-moment version of ``pweight``."""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    lt = laakso_taagepera(weights)
    return float(p) * (1.0 - float(p)) * float(lt) / float(alpha) ** 2


def _check_above_half(r) -> float:
    r = as_rational(r, "r")
    if not HALF < r < 1:
        raise DomainError(f"Bound holds only for 1/2 < r < 1, got {r}")
    return float(r)


def effb_bound(relative_quota, n_voters: int) -> float:
    """exp(-2 (r - 1/2)^2 N) >= E_B for unit weights and r > 1/2."""
    r = _check_above_half(relative_quota)
    _check_n(n_voters)
    return hoeffding((r - 0.5) * n_voters, n_voters)


def sbp_bound(relative_quota, n_voters: int) -> float:
    """1/2 exp(-2 (r - 1/2)^2 (N - 1)) >= S_B+ for unit weights and r > 1/2."""
    r = _check_above_half(relative_quota)
    _check_n(n_voters)
    return float(0.5 * np.exp(-2.0 * (r - 0.5) ** 2 * (n_voters - 1)))


@dataclass(frozen=True)
class BoundParams:
    """Inputs for ``bounds``; each bound is evaluated when its inputs are present."""

    deviation: float | None = None
    sigma_sq: float | None = None
    alpha: float | None = None
    weights: Sequence | None = None
    p: float | None = None
    relative_quota: Fraction | None = None
    n_voters: int | None = None


@dataclass(frozen=True)
class BoundValues:
    hoeffding: float | None = None
    pweight: float | None = None
    chebyshev: float | None = None
    effb: float | None = None
    sbp: float | None = None


def bounds(params: BoundParams) -> BoundValues:
    values = {}
    if params.deviation is not None and params.sigma_sq is not None:
        values["hoeffding"] = hoeffding(params.deviation, params.sigma_sq)
    if params.alpha is not None and params.weights is not None:
        values["pweight"] = pweight(params.alpha, params.weights)
        if params.p is not None:
            values["chebyshev"] = chebyshev_weight(params.alpha, params.p, params.weights)
    if params.relative_quota is not None and params.n_voters is not None:
        values["effb"] = effb_bound(params.relative_quota, params.n_voters)
        values["sbp"] = sbp_bound(params.relative_quota, params.n_voters)
    return BoundValues(**values)


# ── Convergence tables ──────────────────────────────────────────────────


@dataclass(frozen=True)
class LimitRow:
    n_voters: int
    value: Fraction | float
    limit: Fraction | float | None
    gap: float | None
    bound: float | None = None
    approx: float | None = None  # dbApprox / sbApprox where they apply
    success_cut: int | None = None


@dataclass(frozen=True)
class LimitReport:
    """Exact finite-N values of one quantity next to its limit and bound."""

    quantity: str
    measure_id: str
    relative_quota: Fraction
    simple_majority: bool
    rows: tuple[LimitRow, ...]

    def __post_init__(self):
        ns = [row.n_voters for row in self.rows]
        if ns != sorted(ns):
            raise ValueError(f"Rows must be sorted by N, got {ns}")
        for row in self.rows:
            if row.bound is not None and float(row.value) > row.bound:
                raise ValueError(
                    f"{self.quantity} at N={row.n_voters} is {float(row.value)}, "
                    f"above its bound {row.bound}"
                )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "N": row.n_voters,
                    self.quantity: row.value,
                    "limit": row.limit,
                    "gap": row.gap,
                    "bound": row.bound,
                    "approx": row.approx,
                }
                for row in self.rows
            ],
            columns=["N", self.quantity, "limit", "gap", "bound", "approx"],
        )


def _limit_for(quantity: str, r: Fraction, mu: BeliefMeasure) -> Fraction | None:
    if quantity in ("D", "DPlus", "DMinus"):
        return Fraction(0)
    if mu == penrose_banzhaf():
        lim = limits(r)
        table = {
            "E": lim.banzhaf_efficiency,
            "SPlus": lim.banzhaf_s_plus,
            "SMinus": lim.banzhaf_s_minus,
            "S": lim.banzhaf_s,
        }
    elif mu == shapley_shubik():
        lim = limits(r)
        table = {
            "E": lim.shapley_efficiency,
            "SPlus": lim.shapley_s_plus,
            "SMinus": lim.shapley_s_minus,
            "S": lim.shapley_s,
        }
    else:
        lim = limits(r, mu)
        table = {
            "E": lim.belief_efficiency,
            "SPlus": lim.belief_s_plus,
            "SMinus": lim.belief_s_minus,
            "S": lim.belief_s,
        }
    return table[quantity]


def _bound_for(quantity: str, r: Fraction, mu: BeliefMeasure, n: int) -> float | None:
    if r <= HALF or mu != penrose_banzhaf():
        return None
    if quantity == "E":
        return effb_bound(r, n)
    if quantity == "SPlus":
        return sbp_bound(r, n)
    return None


def _exact_value(
    quantity: str, mu: BeliefMeasure, n: int, quota_r: Fraction, settings: Settings
) -> Fraction | float:
    if mu == shapley_shubik():
        forms = closed_forms(n, quota_r)
        return {
            "DPlus": forms.d_plus,
            "DMinus": forms.d_minus,
            "D": forms.d,
            "SPlus": forms.s_plus,
            "SMinus": forms.s_minus,
            "S": forms.s,
            "E": forms.efficiency,
        }[quantity]
    if mu == penrose_banzhaf():
        if quantity == "D":
            return banzhaf_decisiveness(n, quota_r, settings)
        if quantity == "E":
            return banzhaf_efficiency(n, quota_r)
        if quantity == "SPlus":
            return banzhaf_affirmative_success(n, quota_r)
    system = unit_weight_system(n, quota_r)
    return analyze(system, mu, settings=settings).value(quantity)


def convergence_table(
    quantity: str,
    relative_quota,
    mu: BeliefMeasure,
    ns: Sequence[int],
    *,
    simple: bool = False,
    settings: Settings | None = None,
    progress: bool = False,
) -> LimitReport:
    """Exact values of ``quantity`` for unit-weight systems at each N, with limit and bound.

    With ``simple=True`` each row uses the simple majority quota 1/2 + 1/(2N)
    and the limit is taken at r = 1/2 (``relative_quota`` is then ignored for
    the systems).
    """
    if quantity not in QUANTITIES:
        raise DomainError(f"Unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    ns = list(ns)
    if ns != sorted(ns):
        raise DomainError(f"N values must be ascending, got {ns}")
    settings = settings or load_settings()
    r = HALF if simple else as_rational(relative_quota, "r")
    _check_open_unit(r)
    limit = _limit_for(quantity, r, mu)

    rows = []
    for n in tqdm(ns, desc=f"{quantity} rows", disable=not progress):
        _check_n(n)
        quota_r = simple_majority(n).relative_quota if simple else r
        value = _exact_value(quantity, mu, n, quota_r, settings)
        approx = None
        if simple and mu == penrose_banzhaf():
            if quantity == "D":
                approx = db_approx(n)
            elif quantity == "S":
                approx = sb_approx(n)
        rows.append(
            LimitRow(
                n_voters=n,
                value=value,
                limit=limit,
                gap=None if limit is None else abs(float(value) - float(limit)),
                bound=_bound_for(quantity, quota_r, mu, n),
                approx=approx,
                success_cut=winning_size(n, quota_r) - 1,
            )
        )
        logger.debug("%s at N=%d: %s", quantity, n, float(value))

    logger.info("Convergence table for %s under %s: %d rows", quantity, mu.name, len(rows))
    return LimitReport(quantity, mu.name, r, simple, tuple(rows))
