"""Command-line front end.

Commands:
    analyze          exact D+/D-/D, S+/S-/S for every voter and efficiency E
    validate         engine against the brute-force oracle plus measure checks
    converge         exact values over a range of N next to limits and bounds
    sample           Monte Carlo estimates, with exact values when affordable
    invariant-check  is winning determined by coalition size alone?

Usage:
    PYTHONPATH=. python scripts/votepower.py analyze --system majority3.json \\
        --measure shapley-shubik --format json
    PYTHONPATH=. python scripts/votepower.py converge --quantity S \\
        --measure shapley-shubik --simple --n 3:101:2

Errors are reported on stderr as {"error": category, "message": text} and
the process exits with the category's code (see ``src.errors``).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import pandas as pd

from src.analysis.asymptotics import convergence_table
from src.analysis.engine import (
    QUANTITIES,
    analyze,
    brute_force_analyze,
    check_dp_budget,
    size_profile,
)
from src.analysis.montecarlo import MC_QUANTITIES, estimate, estimates_frame
from src.config import load_settings
from src.data.load_inputs import load_family, load_measure, load_system
from src.data.measures import (
    MEASURE_FACTORIES,
    BeliefMeasure,
    kernel,
    penrose_banzhaf,
    shapley_shubik,
    unanimity,
    validate_reflection,
)
from src.data.rationals import as_rational
from src.data.systems import ExplicitVotingSystem, detect_invariant
from src.errors import (
    CapExceededError,
    ParseError,
    ResourceError,
    SymmetryError,
    ValidationFailure,
    VotingPowerError,
)
from src.output import FORMATS, NUMERIC_MODES, check_digits, render_frame, render_report

logger = logging.getLogger(__name__)

COMMANDS = ("analyze", "validate", "converge", "sample", "invariant-check")


@dataclass
class RunConfig:
    """One fully parsed command invocation."""

    command: str
    system: Path | None = None
    measure: str | None = None
    family: Path | None = None
    output_format: str = "table"
    numeric: str = "rational"
    digits: int = 6
    seed: int | None = None
    samples: int = 100_000
    n_range: tuple[int, ...] = ()
    quantity: str | None = None
    relative_quota: Fraction | None = None
    simple: bool = False
    voter: int = 1
    n_max: int | None = None
    allow_asymmetric: bool = False
    workers: int = 1
    progress: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParseError(f"Unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.output_format not in FORMATS:
            raise ParseError(f"Unknown format {self.output_format!r}; expected one of {FORMATS}")
        if self.numeric not in NUMERIC_MODES:
            raise ParseError(
                f"Unknown numeric mode {self.numeric!r}; expected one of {NUMERIC_MODES}"
            )
        check_digits(self.digits)
        for label, path in (("system", self.system), ("family", self.family)):
            if path is not None and not Path(path).exists():
                raise ParseError(f"{label} file {path} does not exist")
        if (
            self.measure is not None
            and self.measure not in MEASURE_FACTORIES
            and not Path(self.measure).exists()
        ):
            raise ParseError(
                f"--measure must be one of {sorted(MEASURE_FACTORIES)} or an existing file, "
                f"got {self.measure!r}"
            )

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) in (None, ())]
        if missing:
            flags = ", ".join("--" + n.replace("_", "-") for n in missing)
            raise ParseError(f"{self.command} needs {flags}")


def parse_n_range(text: str) -> tuple[int, ...]:
    """"3:101:2" (inclusive stop), "101,1001,10001" or a single N."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            if len(parts) != 3 or parts[2] < 1:
                raise ValueError(text)
            start, stop, step = parts
            return tuple(range(start, stop + 1, step))
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise ParseError(
            f"Malformed N range {text!r}; use start:stop:step or a comma list"
        ) from exc


# ── Commands ────────────────────────────────────────────────────────────


def _render(config: RunConfig, df: pd.DataFrame, meta: dict) -> str:
    return render_frame(df, config.output_format, config.numeric, config.digits, meta)


def _load_voting_measure(config: RunConfig) -> BeliefMeasure:
    mu = load_measure(config.measure)
    if not config.allow_asymmetric and not validate_reflection(mu):
        raise SymmetryError(
            f"Measure {mu.name} is not reflection symmetric; "
            "pass --allow-asymmetric to sample from it"
        )
    return mu


def _cmd_analyze(config: RunConfig) -> str:
    config.require("system", "measure")
    system = load_system(config.system)
    mu = load_measure(config.measure)
    report = analyze(system, mu, workers=config.workers)
    return render_report(report, config.output_format, config.numeric, config.digits)


def _validation_checks(system, mu: BeliefMeasure, settings) -> list[dict]:
    checks = []

    def record(name: str, passed: bool) -> None:
        checks.append({"measure": mu.name, "check": name, "status": "PASS" if passed else "FAIL"})

    n = system.n_voters
    kern = kernel(mu, n)
    record("kernel total is 1", kern.total() == 1)
    record("kernel symmetric", kern.is_symmetric())
    record("reflection symmetric", validate_reflection(mu))

    exact = analyze(system, mu, settings=settings, require_symmetric=False)
    oracle = brute_force_analyze(system, mu, settings=settings, require_symmetric=False)
    record("engine equals brute force", exact == oracle)

    record(
        "swing counts balance",
        all(
            sum(p.swing_plus) == sum(p.swing_minus)
            for p in (size_profile(system, v, settings) for v in range(n))
        ),
    )
    if mu == penrose_banzhaf():
        record(
            "S = 1/2 + D/2",
            all(vp.s == Fraction(1, 2) + vp.d / 2 for vp in exact.voters),
        )
    return checks


def _cmd_validate(config: RunConfig) -> str:
    config.require("system")
    settings = load_settings()
    system = load_system(config.system)
    n_max = config.n_max if config.n_max is not None else settings.brute_force_max_voters
    if system.n_voters > n_max:
        raise CapExceededError(f"validate is limited to N <= {n_max}, got N={system.n_voters}")

    measures = (
        [load_measure(config.measure)]
        if config.measure is not None
        else [penrose_banzhaf(), shapley_shubik(), unanimity()]
    )
    rows = [row for mu in measures for row in _validation_checks(system, mu, settings)]
    failed = [row for row in rows if row["status"] == "FAIL"]
    verdict = "FAIL" if failed else "PASS"
    logger.info("Validation of %s: %s (%d checks)", system.label(), verdict, len(rows))
    if failed:
        summary = "; ".join(f"{r['measure']}: {r['check']}" for r in failed)
        raise ValidationFailure(f"{len(failed)} of {len(rows)} checks failed: {summary}")
    meta = {"system": system.label(), "result": verdict, "checks": len(rows)}
    return _render(config, pd.DataFrame(rows), meta)


def _cmd_converge(config: RunConfig) -> str:
    config.require("quantity", "measure", "n_range")
    if not config.simple:
        config.require("relative_quota")
    if config.quantity not in QUANTITIES:
        raise ParseError(f"--quantity must be one of {QUANTITIES}, got {config.quantity!r}")
    mu = _load_voting_measure(config)
    report = convergence_table(
        config.quantity,
        config.relative_quota if not config.simple else Fraction(1, 2),
        mu,
        config.n_range,
        simple=config.simple,
        progress=config.progress,
    )
    meta = {
        "quantity": report.quantity,
        "measure": report.measure_id,
        "r": str(report.relative_quota),
        "simple": report.simple_majority,
    }
    return _render(config, report.to_frame(), meta)


def _cmd_sample(config: RunConfig) -> str:
    config.require("system", "measure")
    settings = load_settings()
    system = load_system(config.system)
    mu = _load_voting_measure(config)
    voter = config.voter - 1
    quantities = [config.quantity] if config.quantity else list(MC_QUANTITIES)
    if any(q not in MC_QUANTITIES for q in quantities):
        raise ParseError(f"--quantity must be one of {MC_QUANTITIES}, got {config.quantity!r}")
    seed = config.seed if config.seed is not None else settings.default_seed

    reports = estimate(
        system,
        mu,
        quantities,
        config.samples,
        seed,
        voter=voter,
        workers=config.workers,
        progress=config.progress,
    )
    frame = estimates_frame(reports)

    exact_values = [None] * len(reports)
    if validate_reflection(mu):
        try:
            check_dp_budget(system, settings)
            exact = analyze(system, mu, settings=settings)
            exact_values = [
                1 - exact.efficiency if r.quantity == "Losing" else exact.value(r.quantity, voter)
                for r in reports
            ]
        except (ResourceError, CapExceededError) as exc:
            logger.info("No exact values alongside the estimates: %s", exc)
    frame["exact"] = pd.Series(exact_values, dtype=object)

    meta = {"system": system.label(), "measure": mu.name, "seed": seed, "samples": config.samples}
    return _render(config, frame, meta)


def _cmd_invariant_check(config: RunConfig) -> str:
    if config.family is not None:
        family = load_family(config.family)
    elif config.system is not None:
        family = ExplicitVotingSystem.from_weighted(load_system(config.system))
    else:
        raise ParseError("invariant-check needs --family or --system")
    equivalent = detect_invariant(family)
    row = {
        "n_voters": family.n_voters,
        "winning": len(family.winning),
        "invariant": equivalent is not None,
        "quota": equivalent.quota if equivalent is not None else None,
    }
    return _render(config, pd.DataFrame([row], dtype=object), {"family": family.label()})


HANDLERS = {
    "analyze": _cmd_analyze,
    "validate": _cmd_validate,
    "converge": _cmd_converge,
    "sample": _cmd_sample,
    "invariant-check": _cmd_invariant_check,
}


def error_document(exc: VotingPowerError) -> str:
    return json.dumps({"error": exc.category, "message": str(exc)}) + "\n"


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit status, document)."""
    try:
        document = HANDLERS[config.command](config)
    except VotingPowerError as exc:
        logger.debug("%s failed", config.command, exc_info=True)
        return exc.exit_code, error_document(exc)
    return 0, document


# ── Argument parsing ────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", type=Path, help="system JSON file")
    common.add_argument(
        "--measure",
        help="penrose-banzhaf | shapley-shubik | unanimity (or banzhaf, shapley), or a JSON file",
    )
    common.add_argument("--format", dest="output_format", choices=FORMATS, default="table")
    common.add_argument("--numeric", choices=NUMERIC_MODES, default="rational")
    common.add_argument("--digits", type=int, default=6, help="decimal digits (1-50)")
    common.add_argument("--output", type=Path, help="write the document here instead of stdout")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--progress", action="store_true", help="show progress bars")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="votepower", description="Voting power under common-belief measures."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="exact power report for all voters")

    p = sub.add_parser("validate", parents=[common], help="engine vs brute-force oracle")
    p.add_argument("--n-max", type=int, help="refuse systems with more voters")

    p = sub.add_parser("converge", parents=[common], help="exact values against limits")
    p.add_argument("--quantity", choices=QUANTITIES, required=True)
    p.add_argument("--relative-quota", help="r as a rational, e.g. 3/5")
    p.add_argument("--simple", action="store_true", help="simple majority at every N")
    p.add_argument("--n", dest="n_range", required=True, help="start:stop:step or a comma list")

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo estimates")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--voter", type=int, default=1, help="voter number, from 1")
    p.add_argument("--quantity", choices=MC_QUANTITIES)
    p.add_argument("--allow-asymmetric", action="store_true")

    p = sub.add_parser("invariant-check", parents=[common], help="size-only winning test")
    p.add_argument("--family", type=Path, help="explicit family JSON file")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    relative_quota = getattr(args, "relative_quota", None)
    n_range = getattr(args, "n_range", None)
    return RunConfig(
        command=args.command,
        system=args.system,
        measure=args.measure,
        family=getattr(args, "family", None),
        output_format=args.output_format,
        numeric=args.numeric,
        digits=args.digits,
        seed=getattr(args, "seed", None),
        samples=getattr(args, "samples", 100_000),
        n_range=parse_n_range(n_range) if n_range else (),
        quantity=getattr(args, "quantity", None),
        relative_quota=as_rational(relative_quota, "--relative-quota") if relative_quota else None,
        simple=getattr(args, "simple", False),
        voter=getattr(args, "voter", 1),
        n_max=getattr(args, "n_max", None),
        allow_asymmetric=getattr(args, "allow_asymmetric", False),
        workers=args.workers,
        progress=args.progress,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        datefmt="%H:%M:%S",
    )
    try:
        config = config_from_args(args)
    except VotingPowerError as exc:
        sys.stderr.write(error_document(exc))
        return exc.exit_code

    status, document = run(config)
    if status != 0:
        sys.stderr.write(document)
    elif args.output is not None:
        args.output.write_text(document, encoding="utf-8")
        logger.info("Wrote %s", args.output)
    else:
        sys.stdout.write(document)
    return status


if __name__ == "__main__":
    sys.exit(main())
