"""Road network representation and all-pairs shortest paths.

Networks are small geometric graphs (node coordinates in km). Distances
between every node pair are computed once with Floyd-Warshall and then
used as a lookup table by the assignment and pricing layers.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, ParseError, RoutingError, ValidationError

DEFAULT_SPEED_KMH = 30.0
MAX_NODES = 2000

#: distance/time stored for pairs with no connecting path
UNREACHABLE = math.inf
#: next_hop entry for pairs with no connecting path
NO_HOP = -1


@dataclass(frozen=True)
class Node:
    node_id: int
    x_km: float
    y_km: float


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    distance_km: float
    time_min: float | None = None


@dataclass(frozen=True)
class RoadNetwork:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    directed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        validate_network(self)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def coordinates(self) -> np.ndarray:
        return np.array([[nd.x_km, nd.y_km] for nd in self.nodes], dtype=float)


def validate_network(net: RoadNetwork) -> None:
    ids = [nd.node_id for nd in net.nodes]
    seen = set()
    for i in ids:
        if i in seen:
            raise ValidationError(f"duplicate node id {i}")
        seen.add(i)
    if sorted(ids) != list(range(len(ids))):
        raise ValidationError("node ids must be contiguous from 0")
    if [nd.node_id for nd in net.nodes] != list(range(len(ids))):
        raise ValidationError("nodes must be listed in id order")
    if len(ids) > MAX_NODES:
        raise ValidationError(f"network has {len(ids)} nodes; cap is {MAX_NODES}")
    for e in net.edges:
        for end in (e.u, e.v):
            if end not in seen:
                raise ValidationError(f"edge ({e.u}, {e.v}) references missing node {end}")
        if not (e.distance_km > 0 and math.isfinite(e.distance_km)):
            raise ValidationError(f"edge ({e.u}, {e.v}) has non-positive distance {e.distance_km}")
        if e.time_min is not None and not (e.time_min > 0 and math.isfinite(e.time_min)):
            raise ValidationError(f"edge ({e.u}, {e.v}) has non-positive time {e.time_min}")


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Dense all-pairs table.

    ``dist_km[i, j]`` is the shortest distance, ``time_min[i, j]`` the travel
    time along that same path, and ``next_hop[i, j]`` the node following
    ``i`` on it. Unreachable pairs hold :data:`UNREACHABLE` / :data:`NO_HOP`.
    """

    dist_km: np.ndarray
    time_min: np.ndarray
    next_hop: np.ndarray
    directed: bool = False

    def __post_init__(self):
        for arr in (self.dist_km, self.time_min, self.next_hop):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.dist_km.shape[0]

    def distance(self, i: int, j: int) -> float:
        d = float(self.dist_km[i, j])
        if d == UNREACHABLE:
            raise RoutingError(f"node {j} is unreachable from node {i}", node=j)
        return d

    def time(self, i: int, j: int) -> float:
        t = float(self.time_min[i, j])
        if t == UNREACHABLE:
            raise RoutingError(f"node {j} is unreachable from node {i}", node=j)
        return t

    def path(self, i: int, j: int) -> list[int]:
        if i == j:
            return [i]
        if self.next_hop[i, j] == NO_HOP:
            raise RoutingError(f"node {j} is unreachable from node {i}", node=j)
        out = [i]
        while i != j:
            i = int(self.next_hop[i, j])
            out.append(i)
        return out

    def save(self, path) -> None:
        np.savez(path, dist_km=self.dist_km, time_min=self.time_min,
                 next_hop=self.next_hop, directed=np.array(self.directed))

    @classmethod
    def load(cls, path) -> "DistanceMatrix":
        try:
            with np.load(path) as z:
                return cls(z["dist_km"].copy(), z["time_min"].copy(),
                           z["next_hop"].copy(), bool(z["directed"]))
        except (OSError, KeyError, ValueError) as exc:
            raise ParseError(f"cannot read distance matrix {path}: {exc}") from exc


def generate_grid(rows: int, cols: int, spacing_km: float,
                  jitter_fraction: float = 0.0, seed: int = 0) -> RoadNetwork:
    """Jittered ``rows x cols`` lattice with 4-neighbour streets."""
    if rows < 2 or cols < 2:
        raise InputError(f"grid needs rows >= 2 and cols >= 2, got {rows}x{cols}")
    if not spacing_km > 0:
        raise InputError(f"spacing_km must be positive, got {spacing_km}")
    if not 0.0 <= jitter_fraction <= 0.4:
        raise InputError(f"jitter_fraction must lie in [0, 0.4], got {jitter_fraction}")
    rng = np.random.default_rng(seed)
    amp = jitter_fraction * spacing_km
    offsets = rng.uniform(-amp, amp, size=(rows * cols, 2)) if amp > 0 else np.zeros((rows * cols, 2))
    nodes = []
    for r in range(rows):
        for c in range(cols):
            k = r * cols + c
            nodes.append(Node(k, c * spacing_km + float(offsets[k, 0]),
                              r * spacing_km + float(offsets[k, 1])))
    edges = []
    for r in range(rows):
        for c in range(cols):
            k = r * cols + c
            if c + 1 < cols:
                edges.append(_euclid_edge(nodes, k, k + 1))
            if r + 1 < rows:
                edges.append(_euclid_edge(nodes, k, k + cols))
    return RoadNetwork(tuple(nodes), tuple(edges))


def _euclid_edge(nodes, u, v) -> Edge:
    a, b = nodes[u], nodes[v]
    return Edge(u, v, math.hypot(a.x_km - b.x_km, a.y_km - b.y_km))


def read_csv_rows(source, header: list[str]):
    path = Path(source)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise ParseError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [h.strip() for h in first] != header:
            raise ParseError(f"{path.name}: expected header {','.join(header)}", line=1)
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"{path.name}: expected {len(header)} fields, got {len(row)}",
                                 line=reader.line_num)
            yield reader.line_num, [cell.strip() for cell in row]


def load_network(nodes_source, edges_source, directed: bool = False) -> RoadNetwork:
    nodes = []
    for line, (nid, x, y) in read_csv_rows(nodes_source, ["node_id", "x_km", "y_km"]):
        try:
            nodes.append(Node(int(nid), float(x), float(y)))
        except ValueError as exc:
            raise ParseError(f"bad node row: {exc}", line=line) from exc
    nodes.sort(key=lambda nd: nd.node_id)
    edges = []
    for line, (u, v, d, t) in read_csv_rows(edges_source, ["u", "v", "distance_km", "time_min"]):
        try:
            edges.append(Edge(int(u), int(v), float(d), float(t) if t else None))
        except ValueError as exc:
            raise ParseError(f"bad edge row: {exc}", line=line) from exc
    return RoadNetwork(tuple(nodes), tuple(edges), directed)


def load_network_dir(directory, directed: bool = False) -> RoadNetwork:
    d = Path(directory)
    return load_network(d / "nodes.csv", d / "edges.csv", directed)


def save_network(net: RoadNetwork, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with (d / "nodes.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_id", "x_km", "y_km"])
        for nd in net.nodes:
            w.writerow([nd.node_id, repr(nd.x_km), repr(nd.y_km)])
    with (d / "edges.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "distance_km", "time_min"])
        for e in net.edges:
            w.writerow([e.u, e.v, repr(e.distance_km), "" if e.time_min is None else repr(e.time_min)])


def all_pairs_shortest_paths(net: RoadNetwork, speed_kmh: float = DEFAULT_SPEED_KMH) -> DistanceMatrix:
    """Floyd-Warshall over edge distances.

    Times are carried along the distance-shortest path; an equal-distance
    alternative never replaces the incumbent, so results do not depend on
    relaxation ties.
    """
    if not speed_kmh > 0:
        raise InputError(f"speed_kmh must be positive, got {speed_kmh}")
    n = net.n
    dist = np.full((n, n), UNREACHABLE)
    tmin = np.full((n, n), UNREACHABLE)
    nxt = np.full((n, n), NO_HOP, dtype=np.int64)
    idx = np.arange(n)
    dist[idx, idx] = 0.0
    tmin[idx, idx] = 0.0
    nxt[idx, idx] = idx
    for e in net.edges:
        t = e.time_min if e.time_min is not None else e.distance_km / speed_kmh * 60.0
        pairs = [(e.u, e.v)] if net.directed else [(e.u, e.v), (e.v, e.u)]
        for a, b in pairs:
            # parallel edges: keep the shortest
            if e.distance_km < dist[a, b]:
                dist[a, b] = e.distance_km
                tmin[a, b] = t
                nxt[a, b] = b

    for k in range(n):
        via = dist[:, k, None] + dist[None, k, :]
        better = via < dist
        if not better.any():
            continue
        dist = np.where(better, via, dist)
        tmin = np.where(better, tmin[:, k, None] + tmin[None, k, :], tmin)
        nxt = np.where(better, nxt[:, k, None], nxt)
    return DistanceMatrix(dist, tmin, nxt, net.directed)
