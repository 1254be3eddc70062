"""End-to-end pipeline: requests -> optimal assignment -> quotes -> scenarios -> agents."""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .agents import ALL_DESCRIPTORS, DEFAULT_SUBSET, axis_agent, pbe_agent, random_agent
from .assignment import (DEFAULT_CAPACITY, MAX_PASSENGERS, Assignment, RideRequest,
                         optimal_assignment)
from .errors import ConfigurationError, InputError, ParseError
from .explanations import FEATURE_NAMES, Scenario, extract_features
from .mlp import MLPModel
from .pricing import (FareConfig, TripQuote, co2_saved, private_quote, public_quote,
                      shared_total_cost, split_proportional)
from .roadnet import (DistanceMatrix, RoadNetwork, all_pairs_shortest_paths, generate_grid,
                      load_network_dir, read_csv_rows)

log = logging.getLogger(__name__)

DEFAULT_SNAP_CUTOFF_KM = 2.0


@dataclass(frozen=True)
class ExperimentConfig:
    network_dir: str | None = None
    grid_rows: int = 10
    grid_cols: int = 10
    grid_spacing_km: float = 0.8
    grid_jitter: float = 0.2
    grid_seed: int = 0
    origin: int = 0
    passengers: int = 8
    rounds: int = 1
    capacity: int = DEFAULT_CAPACITY
    fare: FareConfig = field(default_factory=FareConfig)
    request_seed: int = 0
    label_seed: int = 0
    train_seed: int = 0
    agent_seed: int = 0
    output_dir: str = "out"

    def __post_init__(self):
        if not 1 <= self.passengers <= MAX_PASSENGERS:
            raise ConfigurationError(f"passengers must lie in [1, {MAX_PASSENGERS}], got {self.passengers}")
        if self.rounds < 1:
            raise ConfigurationError(f"rounds must be >= 1, got {self.rounds}")
        if not 1 <= self.capacity <= 4:
            raise ConfigurationError(f"capacity must lie in [1, 4], got {self.capacity}")
        if self.network_dir is not None and not Path(self.network_dir).is_dir():
            raise ConfigurationError(f"network directory {self.network_dir} does not exist")

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        fare = data.pop("fare", {})
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigurationError(f"unknown experiment config keys: {sorted(unknown)}")
        return cls(fare=FareConfig.from_mapping(fare), **data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read experiment config {path}: {exc}") from exc
        return cls.from_mapping(data)

    def network(self) -> RoadNetwork:
        if self.network_dir is not None:
            return load_network_dir(self.network_dir)
        return generate_grid(self.grid_rows, self.grid_cols, self.grid_spacing_km,
                             self.grid_jitter, self.grid_seed)


def quote_assignment(origin: int, assignment: Assignment, matrix: DistanceMatrix,
                     cfg: FareConfig) -> dict[int, TripQuote]:
    """Per-passenger quotes: proportional share of the shared fare plus both alternatives."""
    quotes = {}
    for route in assignment.routes:
        pids = route.passenger_order
        dests = dict(zip(pids, route.visit_order))
        private = {p: private_quote(origin, dests[p], matrix, cfg) for p in pids}
        payments = split_proportional(shared_total_cost(route, cfg), [private[p][0] for p in pids])
        saved = co2_saved(route, {p: matrix.distance(origin, dests[p]) for p in pids}, cfg)
        for p, pay in zip(pids, payments):
            pub_cost, pub_time, _ = public_quote(origin, dests[p], matrix, cfg)
            quotes[p] = TripQuote(
                shared_cost_usd=pay,
                shared_time_min=route.per_passenger[p].ride_time_min,
                private_cost_usd=private[p][0],
                private_time_min=private[p][1],
                public_cost_usd=pub_cost,
                public_time_min=pub_time,
                co2_saved_kg=saved[p],
            )
    return quotes


def sample_requests(rng: np.random.Generator, n_nodes: int, origin: int, count: int) -> list[RideRequest]:
    # the origin itself is excluded: a zero-length trip has no relative comparison
    candidates = np.array([v for v in range(n_nodes) if v != origin])
    dests = rng.choice(candidates, size=count, replace=True)
    return [RideRequest(i, int(d)) for i, d in enumerate(dests)]


def generate_scenarios(cfg: ExperimentConfig, matrix: DistanceMatrix | None = None,
                       requests: Sequence[RideRequest] | None = None):
    """One scenario per passenger per round.

    Returns ``(scenarios, assignments)``. When ``requests`` is given, a
    single round is run on exactly those requests.
    """
    if matrix is None:
        matrix = all_pairs_shortest_paths(cfg.network(), cfg.fare.speed_kmh)
    if not 0 <= cfg.origin < matrix.n:
        raise ConfigurationError(f"origin {cfg.origin} is not a network node")
    rounds = [list(requests)] if requests is not None else None
    scenarios, assignments = [], []
    n_rounds = 1 if rounds is not None else cfg.rounds
    for r in range(n_rounds):
        if rounds is not None:
            reqs = rounds[0]
        else:
            rng = np.random.default_rng([cfg.request_seed, r])
            reqs = sample_requests(rng, matrix.n, cfg.origin, cfg.passengers)
        assignment = optimal_assignment(cfg.origin, reqs, matrix, cfg.capacity)
        assignments.append(assignment)
        quotes = quote_assignment(cfg.origin, assignment, matrix, cfg.fare)
        base = len(scenarios)
        for k, req in enumerate(sorted(reqs, key=lambda q: q.passenger_id)):
            scenarios.append(Scenario(base + k, quotes[req.passenger_id]))
    return scenarios, assignments


def ingest_trips(trips_source, network: RoadNetwork,
                 cutoff_km: float = DEFAULT_SNAP_CUTOFF_KM) -> tuple[list[RideRequest], int]:
    """Snap each dropoff to its nearest node; returns (requests, skipped_count)."""
    coords = network.coordinates()
    requests, skipped = [], 0
    header = ["pickup_x_km", "pickup_y_km", "dropoff_x_km", "dropoff_y_km"]
    for line, row in read_csv_rows(trips_source, header):
        try:
            _, _, dx, dy = (float(v) for v in row)
        except ValueError as exc:
            raise ParseError(f"bad trip row: {exc}", line=line) from exc
        d = np.hypot(coords[:, 0] - dx, coords[:, 1] - dy)
        node = int(np.argmin(d))
        if d[node] > cutoff_km:
            skipped += 1
            continue
        requests.append(RideRequest(len(requests), node))
    if skipped:
        log.warning("skipped %d trips farther than %.3g km from every node", skipped, cutoff_km)
    return requests, skipped


def save_requests(requests: Sequence[RideRequest], path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["passenger_id", "destination_node"])
        for r in requests:
            w.writerow([r.passenger_id, r.destination])


def load_requests(path) -> list[RideRequest]:
    out = []
    for line, (pid, dest) in read_csv_rows(path, ["passenger_id", "destination_node"]):
        try:
            out.append(RideRequest(int(pid), int(dest)))
        except ValueError as exc:
            raise ParseError(f"bad request row: {exc}", line=line) from exc
    return out


@dataclass
class RunReport:
    rows: list[dict]
    summary: dict


REPORT_HEADER = ["scenario_id", *FEATURE_NAMES, "pbe_count", "pbe_texts",
                 "random_count", "random_indices", "random_texts",
                 "axis_count", "axis_indices", "axis_texts"]
TEXT_SEP = " | "


def run_comparison(scenarios: Sequence[Scenario], model: MLPModel,
                   subset: Sequence[int] = DEFAULT_SUBSET, seed: int = 0,
                   random_pool: Sequence[int] = ALL_DESCRIPTORS) -> RunReport:
    if not scenarios:
        raise InputError("no scenarios to compare")
    if model is None:
        raise ConfigurationError("the axis agent needs a trained model")
    rows = []
    axis_hits = np.zeros(len(subset))
    random_hits = np.zeros(17)
    counts = {"pbe": [], "random": [], "axis": []}
    for s in scenarios:
        pbe = pbe_agent(s)
        rnd = random_agent(s, seed, random_pool)
        axs = axis_agent(model, subset, s)
        for i in rnd.indices:
            random_hits[i] += 1
        for i in axs.indices:
            axis_hits[list(subset).index(i)] += 1
        counts["pbe"].append(len(pbe.disclosures))
        counts["random"].append(len(rnd.selected))
        counts["axis"].append(len(axs.selected))
        feats = extract_features(s)
        rows.append({
            "scenario_id": s.scenario_id,
            **{name: repr(float(v)) for name, v in zip(FEATURE_NAMES, feats)},
            "pbe_count": len(pbe.disclosures),
            "pbe_texts": TEXT_SEP.join(pbe.texts),
            "random_count": len(rnd.selected),
            "random_indices": " ".join(map(str, rnd.indices)),
            "random_texts": TEXT_SEP.join(rnd.texts),
            "axis_count": len(axs.selected),
            "axis_indices": " ".join(map(str, axs.indices)),
            "axis_texts": TEXT_SEP.join(axs.texts),
        })
    n = len(scenarios)
    summary = {
        "scenarios": n,
        "mean_count": {k: float(np.mean(v)) for k, v in counts.items()},
        "axis_selection_rate": {str(i): float(h / n) for i, h in zip(subset, axis_hits)},
        "random_selection_rate": {str(i): float(h / n) for i, h in enumerate(random_hits)},
    }
    return RunReport(rows, summary)


def write_report(report: RunReport, path) -> Path:
    """Write the CSV rows and a ``<stem>.summary.json`` next to it."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_HEADER, lineterminator="\n")
        w.writeheader()
        w.writerows(report.rows)
    summary_path = path.with_name(path.stem + ".summary.json")
    summary_path.write_text(json.dumps(report.summary, indent=2, sort_keys=True) + "\n")
    return summary_path
