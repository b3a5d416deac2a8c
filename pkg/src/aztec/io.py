"""Schema-versioned JSON for tilings, particle trajectories and reports.

Output is canonical (sorted keys, fixed separators), so re-running a recorded
configuration reproduces the same bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .dynamics import InterlacedConfiguration, simulate
from .rng import GENERATOR_ID
from .shuffling import Domino, DominoTiling, InvariantViolation, classify
from .stats import StatReport

__all__ = [
    "ParseError",
    "TILING_SCHEMA",
    "TRAJECTORY_SCHEMA",
    "REPORT_SCHEMA",
    "TrajectoryFile",
    "tiling_to_dict",
    "tiling_from_dict",
    "dump_tiling",
    "load_tiling",
    "dump_trajectory",
    "load_trajectory",
    "record_trajectory",
    "replay",
    "dump_report",
    "load_report",
]

TILING_SCHEMA = "aztec-tiling/1"
TRAJECTORY_SCHEMA = "aztec-trajectory/1"
REPORT_SCHEMA = "aztec-report/1"


class ParseError(ValueError):
    """Malformed or mismatched input document."""


def _dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def _loads(text: str | bytes, schema: str) -> dict:
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    found = doc.get("schema")
    if found != schema:
        raise ParseError(f"expected schema {schema!r}, found {found!r}")
    return doc


def _field(doc: dict, key: str, kind):
    if key not in doc:
        raise ParseError(f"missing field {key!r}")
    v = doc[key]
    if kind is int and (isinstance(v, bool) or not isinstance(v, int)):
        raise ParseError(f"field {key!r} must be an integer")
    if kind is not int and not isinstance(v, kind):
        raise ParseError(f"field {key!r} has the wrong type")
    return v


def tiling_to_dict(tiling: DominoTiling, **extra: Any) -> dict:
    dominoes = sorted(tiling.dominoes(), key=lambda d: (-d.b, d.a, d.orientation))
    doc = {
        "schema": TILING_SCHEMA,
        "order": tiling.order,
        "dominoes": [{"a": d.a, "b": d.b, "orientation": d.orientation, "type": d.type} for d in dominoes],
    }
    doc.update(extra)
    return doc


def tiling_from_dict(doc: dict) -> DominoTiling:
    if doc.get("schema") != TILING_SCHEMA:
        raise ParseError(f"expected schema {TILING_SCHEMA!r}, found {doc.get('schema')!r}")
    order = _field(doc, "order", int)
    if order < 0:
        raise ParseError("order must be nonnegative")
    raw = _field(doc, "dominoes", list)
    dominoes = []
    for item in raw:
        if not isinstance(item, dict):
            raise ParseError("each domino must be an object")
        a, b = _field(item, "a", int), _field(item, "b", int)
        orientation = _field(item, "orientation", str)
        kind = _field(item, "type", str)
        if orientation not in ("horizontal", "vertical"):
            raise ParseError(f"unknown orientation {orientation!r}")
        if classify(a, b, orientation, order) != kind:
            raise ParseError(f"domino at ({a}, {b}) has type {kind!r}, expected {classify(a, b, orientation, order)!r}")
        dominoes.append(Domino(a, b, orientation, kind))
    try:
        tiling = DominoTiling.from_dominoes(order, dominoes)
        tiling.check()
    except (ValueError, InvariantViolation) as exc:
        raise ParseError(f"not a tiling of the order-{order} diamond: {exc}") from None
    return tiling


def dump_tiling(tiling: DominoTiling, **extra: Any) -> str:
    return _dumps(tiling_to_dict(tiling, **extra))


def load_tiling(text: str | bytes) -> DominoTiling:
    return tiling_from_dict(_loads(text, TILING_SCHEMA))


@dataclass
class TrajectoryFile:
    """A recorded run of the particle dynamics from the packed start."""

    seed: int
    n: int
    T: int
    frames: list[InterlacedConfiguration]
    trial: int = 0
    generator_id: str = GENERATOR_ID
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.frames) != self.T + 1:
            raise ValueError(f"expected {self.T + 1} frames, got {len(self.frames)}")
        if any(f.n != self.n for f in self.frames):
            raise ValueError("frame with the wrong number of lines")


def record_trajectory(n: int, T: int, seed: int, trial: int = 0, **config: Any) -> TrajectoryFile:
    return TrajectoryFile(seed, n, T, simulate(n, T, seed, trial), trial, GENERATOR_ID, dict(config))


def replay(traj: TrajectoryFile) -> list[InterlacedConfiguration]:
    """Re-run the recorded configuration; equals ``traj.frames`` when the file is genuine."""
    if traj.generator_id != GENERATOR_ID:
        raise ParseError(f"cannot replay coins from generator {traj.generator_id!r}")
    return simulate(traj.n, traj.T, traj.seed, traj.trial)


def dump_trajectory(traj: TrajectoryFile) -> str:
    return _dumps({
        "schema": TRAJECTORY_SCHEMA,
        "generator_id": traj.generator_id,
        "seed": traj.seed,
        "trial": traj.trial,
        "n": traj.n,
        "T": traj.T,
        "config": traj.config,
        "frames": [[list(line) for line in f.lines] for f in traj.frames],
    })


def load_trajectory(text: str | bytes) -> TrajectoryFile:
    doc = _loads(text, TRAJECTORY_SCHEMA)
    seed, n, T = _field(doc, "seed", int), _field(doc, "n", int), _field(doc, "T", int)
    trial = doc.get("trial", 0)
    gen = _field(doc, "generator_id", str)
    frames_raw = _field(doc, "frames", list)
    try:
        frames = [InterlacedConfiguration(tuple(tuple(line) for line in f)) for f in frames_raw]
        return TrajectoryFile(seed, n, T, frames, trial, gen, doc.get("config", {}))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid trajectory: {exc}") from None


def dump_report(report: StatReport) -> str:
    return _dumps({"schema": REPORT_SCHEMA, **report.to_dict()})


def load_report(text: str | bytes) -> StatReport:
    doc = _loads(text, REPORT_SCHEMA)
    try:
        doc.pop("schema")
        return StatReport.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid report: {exc}") from None
