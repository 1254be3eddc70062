"""Exact single-origin shared-ride assignment.

Passengers all leave from one origin. Every set partition of the passengers
into blocks of at most ``capacity`` is scanned; each block is served by one
vehicle driving the cheapest open path through its destinations. Block
routes are solved once per passenger subset (at most 793 subsets for 12
passengers and capacity 4) so the partition sweep is pure table lookup.

Canonical partition order: the block holding the smallest unplaced element
is chosen first, and the candidates for that block are tried in
lexicographic order of their sorted members. Both the enumerator and the
search use this order, so "first optimum found" is reproducible.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import InputError, RoutingError
from .roadnet import UNREACHABLE, DistanceMatrix

MAX_PASSENGERS = 12
MAX_CAPACITY = 4
DEFAULT_CAPACITY = 4
#: hard guard for the counting / enumeration helpers
MAX_ENUMERATION_N = 16


@dataclass(frozen=True)
class RideRequest:
    passenger_id: int
    destination: int


@dataclass(frozen=True)
class PassengerLeg:
    ride_distance_km: float
    ride_time_min: float


@dataclass(frozen=True)
class VehicleRoute:
    """One vehicle's open path from the origin through its block.

    ``passenger_order[i]`` is dropped at ``visit_order[i]``; ``leg_*`` hold
    the consecutive segments origin->d1, d1->d2, ...
    """

    origin: int
    block: frozenset
    passenger_order: tuple[int, ...]
    visit_order: tuple[int, ...]
    leg_distances_km: tuple[float, ...]
    leg_times_min: tuple[float, ...]
    total_distance_km: float
    per_passenger: dict = field(hash=False)

    @property
    def total_time_min(self) -> float:
        return self.per_passenger[self.passenger_order[-1]].ride_time_min


@dataclass(frozen=True)
class Assignment:
    routes: tuple[VehicleRoute, ...]
    objective_km: float
    partitions_visited: int = 0
    memo_entries: int = 0

    def route_of(self, passenger_id: int) -> VehicleRoute:
        for r in self.routes:
            if passenger_id in r.block:
                return r
        raise KeyError(passenger_id)


def _check_n(n: int, max_block: int) -> None:
    if not 0 <= n <= MAX_ENUMERATION_N:
        raise InputError(f"n must lie in [0, {MAX_ENUMERATION_N}], got {n}")
    if max_block < 1:
        raise InputError(f"max_block must be >= 1, got {max_block}")


def count_partitions(n: int, max_block: int) -> int:
    """Number of set partitions of ``n`` labelled items into blocks of size <= max_block.

    Uses the leader recurrence a(m) = sum_k C(m-1, k-1) a(m-k): the block of
    the first element is picked with k-1 companions from the other m-1.
    """
    _check_n(n, max_block)
    a = [1] + [0] * n
    for m in range(1, n + 1):
        a[m] = sum(math.comb(m - 1, k - 1) * a[m - k] for k in range(1, min(max_block, m) + 1))
    return a[n]


@lru_cache(maxsize=None)
def _candidate_blocks(remaining: int, max_block: int) -> tuple[int, ...]:
    """Bitmasks of the blocks that may hold the lowest set bit of ``remaining``."""
    leader = remaining & -remaining
    rest = remaining ^ leader
    others = [1 << i for i in range(rest.bit_length()) if rest >> i & 1]
    members = []
    for k in range(0, min(max_block - 1, len(others)) + 1):
        for combo in itertools.combinations(others, k):
            members.append((leader,) + combo)
    # lexicographic on member indices; bit values are monotone in index
    members.sort()
    return tuple(sum(m) for m in members)


@lru_cache(maxsize=None)
def _bits(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def enumerate_partitions(n: int, max_block: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield every partition of ``range(n)`` once, in canonical order."""
    _check_n(n, max_block)
    if n == 0:
        yield ()
        return
    stack: list[tuple[int, ...]] = []

    def rec(remaining):
        if remaining == 0:
            yield tuple(stack)
            return
        for block in _candidate_blocks(remaining, max_block):
            stack.append(_bits(block))
            yield from rec(remaining ^ block)
            stack.pop()

    yield from rec((1 << n) - 1)


def best_route_for_block(origin: int, block_destinations: Sequence[int], matrix: DistanceMatrix,
                         passenger_ids: Sequence[int] | None = None) -> VehicleRoute:
    """Cheapest open path origin -> d1 -> ... -> dk by exhaustive permutation.

    Ties go to the lexicographically smallest destination sequence (then
    passenger sequence, which only matters for shared destinations).
    """
    k = len(block_destinations)
    if not 1 <= k <= MAX_CAPACITY:
        raise InputError(f"block size must lie in [1, {MAX_CAPACITY}], got {k}")
    if passenger_ids is None:
        passenger_ids = tuple(range(k))
    if len(passenger_ids) != k:
        raise InputError("passenger_ids and block_destinations differ in length")
    dist = matrix.dist_km
    for d in block_destinations:
        if dist[origin, d] == UNREACHABLE:
            raise RoutingError(f"destination node {d} is unreachable from origin {origin}", node=d)

    stops = sorted(zip(block_destinations, passenger_ids))
    best = None
    best_cost = math.inf
    for perm in itertools.permutations(stops):
        cost = 0.0
        here = origin
        for d, _ in perm:
            cost += dist[here, d]
            here = d
        if cost < best_cost:
            best, best_cost = perm, cost
    if best_cost == UNREACHABLE:
        raise RoutingError(f"no connected visiting order for destinations {list(block_destinations)}")
    return _build_route(origin, best, matrix)


def _build_route(origin, stops, matrix: DistanceMatrix) -> VehicleRoute:
    legs_d, legs_t, per = [], [], {}
    here = origin
    total_d = total_t = 0.0
    for d, pid in stops:
        ld = float(matrix.dist_km[here, d])
        lt = float(matrix.time_min[here, d])
        legs_d.append(ld)
        legs_t.append(lt)
        total_d += ld
        total_t += lt
        per[pid] = PassengerLeg(total_d, total_t)
        here = d
    return VehicleRoute(
        origin=origin,
        block=frozenset(pid for _, pid in stops),
        passenger_order=tuple(pid for _, pid in stops),
        visit_order=tuple(d for d, _ in stops),
        leg_distances_km=tuple(legs_d),
        leg_times_min=tuple(legs_t),
        total_distance_km=total_d,
        per_passenger=per,
    )


def optimal_assignment(origin: int, requests: Sequence[RideRequest], matrix: DistanceMatrix,
                       capacity: int = DEFAULT_CAPACITY,
                       max_passengers: int = MAX_PASSENGERS) -> Assignment:
    n = len(requests)
    if n == 0:
        raise InputError("no ride requests")
    if n > max_passengers:
        raise InputError(f"{n} passengers exceeds the cap of {max_passengers}")
    if not 1 <= capacity <= MAX_CAPACITY:
        raise InputError(f"capacity must lie in [1, {MAX_CAPACITY}], got {capacity}")
    ids = [r.passenger_id for r in requests]
    if len(set(ids)) != n:
        raise InputError("passenger ids must be unique")
    for r in requests:
        if not 0 <= r.destination < matrix.n:
            raise InputError(f"destination {r.destination} is not a network node")

    # passengers sorted by id: bit i <-> i-th smallest id
    reqs = sorted(requests, key=lambda r: r.passenger_id)
    memo: dict[int, VehicleRoute] = {}
    for size in range(1, min(capacity, n) + 1):
        for combo in itertools.combinations(range(n), size):
            mask = sum(1 << i for i in combo)
            memo[mask] = best_route_for_block(
                origin, [reqs[i].destination for i in combo], matrix,
                [reqs[i].passenger_id for i in combo])
    cost = {m: r.total_distance_km for m, r in memo.items()}

    best_cost = math.inf
    best_blocks: tuple[int, ...] = ()
    visited = 0
    stack: list[int] = []

    def sweep(remaining: int, acc: float) -> None:
        nonlocal best_cost, best_blocks, visited
        if remaining == 0:
            visited += 1
            if acc < best_cost:
                best_cost = acc
                best_blocks = tuple(stack)
            return
        for block in _candidate_blocks(remaining, capacity):
            stack.append(block)
            sweep(remaining ^ block, acc + cost[block])
            stack.pop()

    sweep((1 << n) - 1, 0.0)
    return Assignment(
        routes=tuple(memo[b] for b in best_blocks),
        objective_km=best_cost,
        partitions_visited=visited,
        memo_entries=len(memo),
    )
