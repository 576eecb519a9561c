"""Numeric formatting and table / CSV / JSON emitters.

Exact values print as "p/q" in rational mode. Decimal mode rounds half to
even at a fixed number of digits after the point; for Fractions the rounding
is done in integers so it is exact. Floats (log-Gamma path, Monte Carlo)
print as their shortest repr in rational mode.

CSV header contract: first column ``voter`` (1-based) or ``N``, then one
column per quantity named exactly DPlus, DMinus, D, SPlus, SMinus, S, E.
"""

from __future__ import annotations

import json
import logging
import math
import numbers
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

import pandas as pd

from src.analysis.engine import QUANTITIES, PowerReport, VoterPower
from src.data.rationals import as_rational
from src.errors import DomainError, ParseError

logger = logging.getLogger(__name__)

FORMATS = ("table", "csv", "json")
NUMERIC_MODES = ("rational", "decimal")
MAX_DIGITS = 50


def check_digits(digits: int) -> int:
    if not 1 <= digits <= MAX_DIGITS:
        raise DomainError(f"Decimal digits must lie in [1, {MAX_DIGITS}], got {digits}")
    return digits


def format_value(value, numeric: str = "rational", digits: int = 6) -> str:
    """Render one cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if not isinstance(value, Fraction) and math.isnan(value):
        return ""
    if numeric == "rational":
        if isinstance(value, Fraction):
            return str(value)
        return repr(float(value))
    if numeric != "decimal":
        raise DomainError(f"Unknown numeric mode {numeric!r}; expected one of {NUMERIC_MODES}")

    check_digits(digits)
    # the context must hold every digit of the result or scaleb/quantize round it
    with localcontext() as ctx:
        ctx.prec = digits + 20
        if isinstance(value, Fraction):
            # round() on a Fraction rounds half to even
            scaled = round(value * 10**digits)
            return f"{Decimal(scaled).scaleb(-digits):f}"
        quantum = Decimal(1).scaleb(-digits)
        return f"{Decimal(float(value)).quantize(quantum, rounding=ROUND_HALF_EVEN):f}"


def format_frame(df: pd.DataFrame, numeric: str = "rational", digits: int = 6) -> pd.DataFrame:
    return df.map(lambda v: format_value(v, numeric, digits))


def render_frame(
    df: pd.DataFrame,
    output_format: str = "table",
    numeric: str = "rational",
    digits: int = 6,
    meta: dict | None = None,
) -> str:
    """Emit ``df`` as an aligned table, CSV or a JSON document with ``meta`` and ``rows``."""
    formatted = format_frame(df, numeric, digits)
    if output_format == "table":
        header = "".join(f"# {k}: {v}\n" for k, v in (meta or {}).items())
        return header + formatted.to_string(index=False) + "\n"
    if output_format == "csv":
        return formatted.to_csv(index=False, lineterminator="\n")
    if output_format == "json":
        document = {**(meta or {}), "rows": formatted.to_dict(orient="records")}
        return json.dumps(document, indent=2) + "\n"
    raise DomainError(f"Unknown output format {output_format!r}; expected one of {FORMATS}")


def render_report(
    report: PowerReport, output_format: str = "table", numeric: str = "rational", digits: int = 6
) -> str:
    if output_format == "json" and numeric == "rational":
        return report_to_json(report)
    meta = {"system": report.system_id, "measure": report.measure_id}
    return render_frame(report.to_frame(), output_format, numeric, digits, meta)


def report_to_json(report: PowerReport) -> str:
    """Canonical JSON form; ``report_from_json`` inverts it exactly."""
    document = {
        "system": report.system_id,
        "measure": report.measure_id,
        "E": str(report.efficiency),
        "voters": [
            {"voter": vp.voter + 1, **{q: str(vp.value(q)) for q in QUANTITIES[:-1]}}
            for vp in report.voters
        ],
    }
    return json.dumps(document, indent=2) + "\n"


def report_from_json(text: str) -> PowerReport:
    try:
        document = json.loads(text)
        voters = tuple(
            VoterPower(
                voter=entry["voter"] - 1,
                d_plus=as_rational(entry["DPlus"], "DPlus"),
                d_minus=as_rational(entry["DMinus"], "DMinus"),
                s_plus=as_rational(entry["SPlus"], "SPlus"),
                s_minus=as_rational(entry["SMinus"], "SMinus"),
            )
            for entry in document["voters"]
        )
        return PowerReport(
            voters=voters,
            efficiency=as_rational(document["E"], "E"),
            system_id=document["system"],
            measure_id=document["measure"],
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"Not a power report document: {exc}") from exc
