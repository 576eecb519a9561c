"""Parse voting system, measure and winning-family documents.

System file:
    {"weights": ["3", 2, "1/2"], "quota": "4"}            or
    {"weights": [1, 1, 1], "relative_quota": "1/2"}

Measure file:
    {"type": "common-belief",
     "atoms": [{"p": "3/10", "mass": "1/4"}, ...],
     "segments": [{"a": "0", "b": "1", "mass": "1/2"}]}
    or {"type": "penrose-banzhaf" | "shapley-shubik" | "unanimity"}

Family file (voters numbered from 1):
    {"n_voters": 3, "winning": [[1, 2], [1, 3]], "closure": true}

Numeric fields are integers or rational strings. Anything malformed raises
``ParseError``; structurally invalid data raises ``StructureError`` from the
constructors.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from src.data.measures import MEASURE_FACTORIES, BeliefMeasure, common_belief
from src.data.systems import ExplicitVotingSystem, WeightedVotingSystem
from src.errors import ParseError

logger = logging.getLogger(__name__)


def _read_document(path: Path | str) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"Cannot read {path}: {exc.strerror}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    if not isinstance(document, dict):
        raise ParseError(f"{path} must contain a JSON object")
    logger.debug("Read %s", path)
    return document


def _require_list(document: dict, key: str) -> list:
    value = document.get(key, [])
    if not isinstance(value, list):
        raise ParseError(f"Field {key!r} must be an array")
    return value


def parse_system(document: dict) -> WeightedVotingSystem:
    if "weights" not in document:
        raise ParseError("System document needs a 'weights' array")
    weights = document["weights"]
    if not isinstance(weights, list) or not weights:
        raise ParseError("'weights' must be a non-empty array")

    has_quota = "quota" in document
    has_relative = "relative_quota" in document
    if has_quota == has_relative:
        raise ParseError("System document needs exactly one of 'quota' or 'relative_quota'")

    if has_quota:
        return WeightedVotingSystem(tuple(weights), document["quota"])
    return WeightedVotingSystem.from_relative_quota(weights, document["relative_quota"])


def load_system(path: Path | str) -> WeightedVotingSystem:
    system = parse_system(_read_document(path))
    logger.info("Loaded %s from %s", system.label(), path)
    return system


def parse_measure(document: dict) -> BeliefMeasure:
    kind = document.get("type")
    if kind in MEASURE_FACTORIES:
        return MEASURE_FACTORIES[kind]()
    if kind != "common-belief":
        known = sorted([*MEASURE_FACTORIES, "common-belief"])
        raise ParseError(f"Unknown measure type {kind!r}; expected one of {known}")

    atoms = []
    for entry in _require_list(document, "atoms"):
        if not isinstance(entry, dict) or set(entry) != {"p", "mass"}:
            raise ParseError(f"Atom entries need exactly the fields p and mass, got {entry!r}")
        atoms.append(entry)
    segments = []
    for entry in _require_list(document, "segments"):
        if not isinstance(entry, dict) or set(entry) != {"a", "b", "mass"}:
            raise ParseError(
                f"Segment entries need exactly the fields a, b and mass, got {entry!r}"
            )
        segments.append(entry)
    return common_belief(atoms, segments, name=document.get("name", "common-belief"))


def load_measure(source: str | Path) -> BeliefMeasure:
    """A measure literal (penrose-banzhaf, shapley-shubik, unanimity) or a file path."""
    if str(source) in MEASURE_FACTORIES:
        return MEASURE_FACTORIES[str(source)]()
    measure = parse_measure(_read_document(source))
    logger.info("Loaded measure %s from %s", measure.name, source)
    return measure


def parse_family(document: dict) -> ExplicitVotingSystem:
    n = document.get("n_voters")
    if isinstance(n, bool) or not isinstance(n, int):
        raise ParseError(f"'n_voters' must be an integer, got {n!r}")

    coalitions = []
    for entry in _require_list(document, "winning"):
        if not isinstance(entry, list):
            raise ParseError(
                f"Each winning coalition must be an array of voter numbers, got {entry!r}"
            )
        members = []
        for voter in entry:
            if isinstance(voter, bool) or not isinstance(voter, int):
                raise ParseError(f"Voter numbers must be integers, got {voter!r}")
            members.append(voter - 1)
        coalitions.append(members)

    if document.get("closure", False):
        return ExplicitVotingSystem.upward_closure(n, coalitions)
    return ExplicitVotingSystem(n, frozenset(frozenset(c) for c in coalitions))


def load_family(path: Path | str) -> ExplicitVotingSystem:
    family = parse_family(_read_document(path))
    logger.info("Loaded %s from %s", family.label(), path)
    return family
