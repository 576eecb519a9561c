"""Check the large-N statements numerically at desk-scale N.

Runs:
    1. Shapley-Shubik efficiency at r = 3/5 against 1 - r (closed form, engine at N = 1000)
    2. Penrose-Banzhaf efficiency and affirmative success against their Hoeffding bounds
    3. Penrose-Banzhaf decisiveness under simple majority against 2 / sqrt(2 pi N)
    4. Efficiency under a common-belief mixture against mu([1/2, 1]), unit and random weights
    5. Success rates under the same mixture against their tail integrals, plus Monte Carlo

Usage:
    PYTHONPATH=. python scripts/verify_limits.py [--samples 100000] [--seed 42]
"""

import argparse
import logging
import sys
import time
from fractions import Fraction

import numpy as np

from src.analysis.asymptotics import (
    banzhaf_affirmative_success,
    banzhaf_decisiveness,
    banzhaf_efficiency,
    closed_forms,
    db_approx,
    effb_bound,
    limits,
    sbp_bound,
)
from src.analysis.engine import analyze
from src.analysis.montecarlo import estimate
from src.data.measures import common_belief, shapley_shubik
from src.data.systems import WeightedVotingSystem, laakso_taagepera, unit_weight_system

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s %(name)s %(levelname)s %(message)s",
    datefmt="%H:%M:%S",
)
logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
MIXTURE = common_belief(
    atoms=[("3/10", "1/4"), ("7/10", "1/4")],
    segments=[(0, 1, "1/2")],
    name="uniform-plus-atoms",
)


def check_shapley_efficiency(results: list) -> None:
    r = Fraction(3, 5)
    for n in (1000, 10_000):
        value = closed_forms(n, r).efficiency
        results.append(("E_S -> 1 - r", n, float(value), abs(value - (1 - r)) <= Fraction(2, n)))
    engine_value = analyze(unit_weight_system(1000, r), shapley_shubik()).efficiency
    matches = engine_value == closed_forms(1000, r).efficiency
    results.append(("E_S engine = closed form", 1000, float(engine_value), matches))


def check_banzhaf_bounds(results: list) -> None:
    for r in (Fraction(11, 20), Fraction(3, 5), Fraction(7, 10)):
        for n in (50, 100, 200):
            e_b = banzhaf_efficiency(n, r)
            s_b = banzhaf_affirmative_success(n, r)
            results.append((f"E_B <= bound (r={r})", n, float(e_b), float(e_b) <= effb_bound(r, n)))
            results.append((f"S_B+ <= bound (r={r})", n, float(s_b), float(s_b) <= sbp_bound(r, n)))


def check_banzhaf_decisiveness(results: list) -> None:
    for n in (100_001, 100_003):
        d_b = banzhaf_decisiveness(n, Fraction(n + 1, 2 * n))
        ratio = float(d_b) / db_approx(n)
        results.append(("D_B / dbApprox", n, ratio, 0.99 <= ratio <= 1.01))


def check_mixture(results: list, samples: int, seed: int) -> None:
    lim = limits(HALF, MIXTURE)

    majority = unit_weight_system(2001, HALF)
    report = analyze(majority, MIXTURE)
    e, s_plus, s_minus = report.efficiency, report.value("SPlus"), report.value("SMinus")
    tol = Fraction(1, 50)
    for label, value, limit in (
        ("E -> mu([r,1])", e, lim.belief_efficiency),
        ("S+ -> tail moment", s_plus, lim.belief_s_plus),
        ("S- -> lower moment", s_minus, lim.belief_s_minus),
    ):
        results.append((label, 2001, float(value), abs(value - limit) <= tol))

    mc = {r.quantity: r for r in estimate(majority, MIXTURE, ["SPlus", "SMinus"], samples, seed)}
    results.append(("MC S+ within 4 SE", 2001, mc["SPlus"].estimate, mc["SPlus"].within(s_plus)))
    results.append(("MC S- within 4 SE", 2001, mc["SMinus"].estimate, mc["SMinus"].within(s_minus)))

    # exact DP is over budget for 1000 weighted voters; the sampler stands in
    rng = np.random.default_rng(seed)
    weights = rng.integers(1, 6, size=1000).tolist()
    weighted = WeightedVotingSystem.from_relative_quota(weights, HALF)
    logger.info("Weighted system: LT_N = %.2e", float(laakso_taagepera(weights)))
    (e_w,) = estimate(weighted, MIXTURE, ["E"], samples, seed)
    gap = abs(e_w.estimate - float(lim.belief_efficiency))
    passed = gap <= 0.03
    results.append(("weighted E -> mu([r,1])", 1000, e_w.estimate, passed))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    start = time.time()
    results: list[tuple[str, int, float, bool]] = []

    logger.info("Step 1: Shapley-Shubik efficiency...")
    check_shapley_efficiency(results)
    logger.info("Step 2: Penrose-Banzhaf bounds...")
    check_banzhaf_bounds(results)
    logger.info("Step 3: Penrose-Banzhaf decisiveness...")
    check_banzhaf_decisiveness(results)
    logger.info("Step 4-5: Common-belief mixture...")
    check_mixture(results, args.samples, args.seed)

    logger.info("Checks complete in %.0fs", time.time() - start)

    failed = [r for r in results if not r[3]]
    print("\n" + "=" * 60)
    print("LIMIT CHECK SUMMARY")
    print("=" * 60)
    for name, n, value, passed in results:
        print(f"{'PASS' if passed else 'FAIL'}  {name:<28} N={n:>7,}  {value:.6f}")
    print("=" * 60)
    print(f"{len(results) - len(failed)} of {len(results)} checks passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
