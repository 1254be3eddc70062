"""Trip quotes for shared, private and public travel, plus cost and CO2 splitting.

All fare constants are synthetic stand-ins for commercial fare and transit
services and live in :class:`FareConfig`. Money stays in floating point
here; rounding happens only when explanations are rendered.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .assignment import VehicleRoute
from .errors import ConfigurationError, InputError, ParseError
from .roadnet import DistanceMatrix


@dataclass(frozen=True)
class FareConfig:
    base_usd: float = 2.50
    per_km_usd: float = 1.56
    per_min_usd: float = 0.35
    bus_fare_usd: float = 2.50
    transit_time_factor: float = 1.6
    transit_wait_min: float = 8.0
    km_per_bus: float = 5.0
    max_buses: int = 3
    co2_kg_per_km: float = 0.192
    speed_kmh: float = 30.0

    def __post_init__(self):
        nonneg = ("base_usd", "per_km_usd", "per_min_usd", "bus_fare_usd",
                  "transit_wait_min", "co2_kg_per_km")
        for name in nonneg:
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigurationError(f"{name} must be a finite value >= 0, got {v}")
        if not self.transit_time_factor >= 1:
            raise ConfigurationError(f"transit_time_factor must be >= 1, got {self.transit_time_factor}")
        if not self.km_per_bus > 0:
            raise ConfigurationError(f"km_per_bus must be > 0, got {self.km_per_bus}")
        if not self.speed_kmh > 0:
            raise ConfigurationError(f"speed_kmh must be > 0, got {self.speed_kmh}")
        if int(self.max_buses) != self.max_buses or self.max_buses < 1:
            raise ConfigurationError(f"max_buses must be a positive integer, got {self.max_buses}")

    @classmethod
    def from_mapping(cls, data: Mapping) -> "FareConfig":
        known = {f.name: f.type for f in dataclasses.fields(cls)}
        unknown = set(data) - set(known)
        if unknown:
            raise ConfigurationError(f"unknown fare config keys: {sorted(unknown)}")
        kwargs = {}
        for k, v in data.items():
            try:
                kwargs[k] = int(v) if k == "max_buses" else float(v)
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"fare config {k}: {exc}") from exc
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "FareConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read fare config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError(f"fare config {path} must be a flat JSON object")
        return cls.from_mapping(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class TripQuote:
    shared_cost_usd: float
    shared_time_min: float
    private_cost_usd: float
    private_time_min: float
    public_cost_usd: float
    public_time_min: float
    co2_saved_kg: float = 0.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"{f.name} must be finite and >= 0, got {v}")


def metered_fare(distance_km: float, time_min: float, cfg: FareConfig) -> float:
    """Distance and time components of a taxi fare, without the base."""
    return cfg.per_km_usd * distance_km + cfg.per_min_usd * time_min


def private_quote(origin: int, dest: int, matrix: DistanceMatrix, cfg: FareConfig) -> tuple[float, float]:
    d = matrix.distance(origin, dest)
    t = matrix.time(origin, dest)
    return cfg.base_usd + metered_fare(d, t, cfg), t


def bus_count(distance_km: float, cfg: FareConfig) -> int:
    return min(cfg.max_buses, 1 + math.floor(distance_km / cfg.km_per_bus))


def public_quote(origin: int, dest: int, matrix: DistanceMatrix,
                 cfg: FareConfig) -> tuple[float, float, int]:
    d = matrix.distance(origin, dest)
    t = matrix.time(origin, dest)
    buses = bus_count(d, cfg)
    return buses * cfg.bus_fare_usd, cfg.transit_time_factor * t + cfg.transit_wait_min, buses


def shared_total_cost(route: VehicleRoute, cfg: FareConfig) -> float:
    """Sum of per-leg taxi fares with the base fare charged once."""
    metered = 0.0
    for d, t in zip(route.leg_distances_km, route.leg_times_min):
        metered += metered_fare(d, t, cfg)
    return cfg.base_usd + metered


def split_proportional(total_shared_usd: float, private_costs: Sequence[float]) -> list[float]:
    """Each passenger pays ``f * c_i`` with ``f = total / sum(c)``."""
    if not private_costs:
        raise InputError("private_costs is empty")
    if any(not (c > 0 and math.isfinite(c)) for c in private_costs):
        raise InputError(f"private costs must be positive, got {list(private_costs)}")
    if not (total_shared_usd >= 0 and math.isfinite(total_shared_usd)):
        raise InputError(f"shared total must be >= 0, got {total_shared_usd}")
    f = total_shared_usd / math.fsum(private_costs)
    return [f * c for c in private_costs]


def co2_saved(route: VehicleRoute, private_distances: Mapping[int, float],
              cfg: FareConfig) -> dict[int, float]:
    """Per-passenger CO2 saving with route emissions allocated like the cost split."""
    total_private = math.fsum(private_distances[p] for p in route.passenger_order)
    if total_private <= 0:
        return {p: 0.0 for p in route.passenger_order}
    g = route.total_distance_km / total_private
    out = {}
    for p in route.passenger_order:
        pd = private_distances[p]
        out[p] = max(0.0, cfg.co2_kg_per_km * (pd - g * pd))
    return out
