"""Engine caps and defaults.

Values come from the environment (optionally a ``.env`` file in the working
directory, loaded with python-dotenv). Unset variables fall back to the
defaults below.

    VOTEPOWER_UNIT_WEIGHT_MAX_VOTERS   largest N for systems with one weight class
    VOTEPOWER_DP_STATE_BUDGET          max (size, weight) states in a coalition DP
    VOTEPOWER_BRUTE_FORCE_MAX_VOTERS   largest N for 2^N enumeration
    VOTEPOWER_EXPLICIT_MAX_VOTERS      largest N for explicit winning families
    VOTEPOWER_EXACT_BINOMIAL_BELOW     exact big-integer path below this N
    VOTEPOWER_DEFAULT_SEED             default Monte Carlo seed
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields

from dotenv import load_dotenv

from src.errors import ParseError

logger = logging.getLogger(__name__)

ENV_PREFIX = "VOTEPOWER_"


@dataclass(frozen=True)
class Settings:
    """Resource caps shared by the engine, oracle and sampler."""

    unit_weight_max_voters: int = 5000
    dp_state_budget: int = 2_000_000
    brute_force_max_voters: int = 20
    explicit_max_voters: int = 24
    exact_binomial_below: int = 10_000
    default_seed: int = 42


def load_settings(dotenv_path: str | None = None) -> Settings:
    """Build ``Settings`` from the environment, reading ``.env`` first."""
    load_dotenv(dotenv_path=dotenv_path, override=False)

    values = {}
    for f in fields(Settings):
        raw = os.getenv(ENV_PREFIX + f.name.upper())
        if raw is None or raw.strip() == "":
            continue
        try:
            value = int(raw.replace("_", ""))
        except ValueError as exc:
            raise ParseError(
                f"{ENV_PREFIX}{f.name.upper()} must be an integer, got {raw!r}"
            ) from exc
        if value < 0:
            raise ParseError(f"{ENV_PREFIX}{f.name.upper()} must be non-negative, got {value}")
        values[f.name] = value

    if values:
        logger.debug("Settings overridden from environment: %s", values)
    return Settings(**values)
