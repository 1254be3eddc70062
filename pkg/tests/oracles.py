"""Reference implementations used only by the tests.

Each one takes a different route from the production code: Dijkstra instead
of Floyd-Warshall, restricted-growth strings instead of leader-block
recursion, plain enumeration instead of a subset memo, finite differences
instead of backpropagation, grid search instead of the closed-form mean.
"""
import heapq
import itertools
import math

import numpy as np


def dijkstra_all_pairs(n, edges, directed=False):
    adj = [[] for _ in range(n)]
    for u, v, w in edges:
        adj[u].append((v, w))
        if not directed:
            adj[v].append((u, w))
    out = np.full((n, n), math.inf)
    for s in range(n):
        dist = out[s]
        dist[s] = 0.0
        heap = [(0.0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, w in adj[u]:
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
    return out


def restricted_growth_partitions(n, max_block):
    """All set partitions of range(n) as sorted block tuples, via restricted growth strings."""
    if n == 0:
        yield ()
        return

    def rec(prefix, k):
        if len(prefix) == n:
            blocks = [[] for _ in range(k)]
            for i, b in enumerate(prefix):
                blocks[b].append(i)
            if all(len(b) <= max_block for b in blocks):
                yield tuple(tuple(b) for b in blocks)
            return
        for b in range(k + 1):
            yield from rec(prefix + [b], max(k, b + 1))

    yield from rec([0], 1)


def recurrence_counts(n_max, max_block):
    a = [1]
    for m in range(1, n_max + 1):
        a.append(sum(math.comb(m - 1, k - 1) * a[m - k] for k in range(1, min(max_block, m) + 1)))
    return a


def open_path_length(dist, origin, order):
    total = 0.0
    here = origin
    for d in order:
        total += dist[here][d]
        here = d
    return total


def brute_force_route(dist, origin, dests):
    """Min open-path length over every ordering of ``dests``."""
    return min(open_path_length(dist, origin, p) for p in itertools.permutations(dests))


def naive_assignment(dist, origin, dests, capacity):
    """Minimum total distance over all partitions, routes solved from scratch each time.

    Block costs are summed in order of the smallest member, matching the
    canonical summation order so the comparison can be exact.
    """
    best = math.inf
    for part in restricted_growth_partitions(len(dests), capacity):
        total = 0.0
        for block in sorted(part):
            total += brute_force_route(dist, origin, sorted(dests[i] for i in block))
        best = min(best, total)
    return best


def central_differences(f, params, eps=1e-5):
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            old = p[idx]
            p[idx] = old + eps
            up = f()
            p[idx] = old - eps
            down = f()
            p[idx] = old
            g[idx] = (up - down) / (2 * eps)
        grads.append(g)
    return grads


def grid_argmax_quadratic(support, probs, step=1e-4):
    lo, hi = min(support), max(support)
    grid = np.arange(lo, hi + step / 2, step)
    s = np.asarray(support)[None, :]
    p = np.asarray(probs)[None, :]
    util = -(p * (grid[:, None] - s) ** 2).sum(axis=1)
    return float(grid[int(np.argmax(util))])
