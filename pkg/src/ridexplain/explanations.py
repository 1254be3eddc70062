"""Explanation taxonomy, values, templated text and model features.

A comparative explanation is fixed by four binary choices, packed into an
index as ``8*mode + 4*criterion + 2*visualization + anchor``:

=============  ===================  ========================
bit            0                    1
=============  ===================  ========================
mode           private taxi         public transportation
criterion      cost                 time
visualization  absolute difference  relative difference
anchor         shared ride          alternative mode
=============  ===================  ========================

Index 16 is the CO2 saving statement.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import IntEnum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, ParseError, UndefinedValueError
from .pricing import TripQuote
from .roadnet import read_csv_rows


class Mode(IntEnum):
    PRIVATE = 0
    PUBLIC = 1


class Criterion(IntEnum):
    COST = 0
    TIME = 1


class Visualization(IntEnum):
    ABSOLUTE = 0
    RELATIVE = 1


class Anchor(IntEnum):
    SHARED_PERSPECTIVE = 0
    ALTERNATIVE_PERSPECTIVE = 1


CO2_INDEX = 16
N_DESCRIPTORS = 17


@dataclass(frozen=True)
class ExplanationDescriptor:
    kind: str  # "comparative" | "co2"
    mode: Mode | None = None
    criterion: Criterion | None = None
    visualization: Visualization | None = None
    anchor: Anchor | None = None

    @property
    def index(self) -> int:
        if self.kind == "co2":
            return CO2_INDEX
        return 8 * self.mode + 4 * self.criterion + 2 * self.visualization + self.anchor

    @classmethod
    def from_index(cls, index: int) -> "ExplanationDescriptor":
        if index == CO2_INDEX:
            return cls("co2")
        if not 0 <= index < CO2_INDEX:
            raise ValueError(f"descriptor index must lie in 0..16, got {index}")
        return cls("comparative", Mode(index >> 3 & 1), Criterion(index >> 2 & 1),
                   Visualization(index >> 1 & 1), Anchor(index & 1))

    def anchor_sibling(self) -> int | None:
        """Index of the descriptor differing only by anchor, if any."""
        return None if self.kind == "co2" else self.index ^ 1

    def short_name(self) -> str:
        if self.kind == "co2":
            return "co2"
        return "-".join([self.mode.name.lower(), self.criterion.name.lower(),
                         "abs" if self.visualization == Visualization.ABSOLUTE else "rel",
                         "s-p" if self.anchor == Anchor.SHARED_PERSPECTIVE else "p-s"])


@dataclass(frozen=True)
class Scenario:
    scenario_id: int
    quote: TripQuote


@dataclass(frozen=True)
class RenderedExplanation:
    descriptor: ExplanationDescriptor
    value: float
    text: str


FEATURE_NAMES = (
    "shared_cost_usd",
    "shared_time_min",
    "private_cost_minus_shared",
    "private_time_minus_shared",
    "public_cost_minus_shared",
    "public_time_minus_shared",
    "co2_saved_kg",
)

SCENARIO_HEADER = ["scenario_id", "shared_cost_usd", "shared_time_min", "private_cost_usd",
                   "private_time_min", "public_cost_usd", "public_time_min", "co2_saved_kg"]


def enumerate_descriptors() -> list[ExplanationDescriptor]:
    return [ExplanationDescriptor.from_index(i) for i in range(N_DESCRIPTORS)]


def _pair(d: ExplanationDescriptor, q: TripQuote) -> tuple[float, float]:
    """(shared, alternative) values compared by descriptor ``d``."""
    if d.criterion == Criterion.COST:
        shared = q.shared_cost_usd
        alt = q.private_cost_usd if d.mode == Mode.PRIVATE else q.public_cost_usd
    else:
        shared = q.shared_time_min
        alt = q.private_time_min if d.mode == Mode.PRIVATE else q.public_time_min
    return shared, alt


def compute_value(d: ExplanationDescriptor, s: Scenario) -> float:
    """Signed comparison value; positive favours the shared ride.

    Relative values are percentages of the anchored-away quantity: the
    shared value when phrased from the alternative's side ("costs X% more"),
    the alternative's value when phrased from the shared side ("saved X%").
    """
    q = s.quote
    if d.kind == "co2":
        return q.co2_saved_kg
    shared, alt = _pair(d, q)
    diff = alt - shared
    if d.visualization == Visualization.ABSOLUTE:
        return diff
    denom = shared if d.anchor == Anchor.ALTERNATIVE_PERSPECTIVE else alt
    if denom == 0:
        raise UndefinedValueError(
            f"relative value of {d.short_name()} undefined: zero denominator "
            f"in scenario {s.scenario_id}")
    return diff / denom * 100.0


def format_money(v: float) -> str:
    return f"{abs(v):.2f}".rstrip("0").rstrip(".")


def format_percent(v: float) -> str:
    return str(math.trunc(abs(v)))


def format_minutes(v: float) -> str:
    return str(Decimal(repr(abs(v))).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def format_kg(v: float) -> str:
    return f"{abs(v):.2f}"


@lru_cache(maxsize=None)
def _bundled_templates() -> dict:
    text = resources.files("ridexplain").joinpath("data/templates.json").read_text()
    return json.loads(text)


def load_templates(path=None) -> dict:
    if path is None:
        return _bundled_templates()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read template table {path}: {exc}") from exc
    missing = [str(i) for i in range(N_DESCRIPTORS) if str(i) not in data.get("explanations", {})]
    if missing:
        raise ConfigurationError(f"template table lacks descriptors {missing}")
    return data


def format_value(d: ExplanationDescriptor, value: float) -> str:
    if d.kind == "co2":
        return format_kg(value)
    if d.visualization == Visualization.RELATIVE:
        return format_percent(value)
    if d.criterion == Criterion.COST:
        return format_money(value)
    return format_minutes(value)


def render(d: ExplanationDescriptor, s: Scenario, templates: dict | None = None) -> RenderedExplanation:
    templates = templates or _bundled_templates()
    value = compute_value(d, s)
    # zero counts as favourable; it has no sign to soften
    wording = "favorable" if value >= 0 else "unfavorable"
    template = templates["explanations"][str(d.index)][wording]
    return RenderedExplanation(d, value, template.format(value=format_value(d, value)))


def extract_features(s: Scenario) -> np.ndarray:
    q = s.quote
    return np.array([
        q.shared_cost_usd,
        q.shared_time_min,
        q.private_cost_usd - q.shared_cost_usd,
        q.private_time_min - q.shared_time_min,
        q.public_cost_usd - q.shared_cost_usd,
        q.public_time_min - q.shared_time_min,
        q.co2_saved_kg,
    ], dtype=float)


def load_scenarios(path) -> list[Scenario]:
    out = []
    for line, row in read_csv_rows(path, SCENARIO_HEADER):
        try:
            sid = int(row[0])
            quote = TripQuote(*(float(x) for x in row[1:]))
        except ValueError as exc:
            raise ParseError(f"bad scenario row: {exc}", line=line) from exc
        out.append(Scenario(sid, quote))
    return out


def save_scenarios(scenarios: Sequence[Scenario], path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCENARIO_HEADER)
        for s in scenarios:
            q = s.quote
            w.writerow([s.scenario_id] + [repr(float(v)) for v in (
                q.shared_cost_usd, q.shared_time_min, q.private_cost_usd, q.private_time_min,
                q.public_cost_usd, q.public_time_min, q.co2_saved_kg)])
