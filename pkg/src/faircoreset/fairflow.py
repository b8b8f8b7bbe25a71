"""Exact fair-clustering objective under profile-level assignment constraints.

For a fixed center set the constrained assignment problem splits into one
transportation problem per group profile: profile ``t`` ships its point
masses to the ``k`` clusters, cluster ``i`` receiving exactly
``quotas[i, t]``.  Those subproblems are solved exactly here by successive
shortest paths; ``brute_force_objective`` is an enumeration oracle for tests.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Dataset, GroupProfile, WeightedPointSet, as_centers, distance_power

BALANCE_RTOL = 1e-9
REDUCED_COST_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProfileConstraint:
    """k x Gamma matrix: mass of profile ``t`` that cluster ``i`` must receive."""

    quotas: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.quotas, dtype=float)
        if q.ndim == 1:
            q = q[:, None]
        if q.ndim != 2:
            raise ValueError("quotas must be a k x Gamma matrix")
        if not np.all(np.isfinite(q)) or np.any(q < 0):
            raise ValueError("quotas must be finite and nonnegative")
        object.__setattr__(self, "quotas", q)

    @property
    def k(self) -> int:
        return self.quotas.shape[0]

    @property
    def n_profiles(self) -> int:
        return self.quotas.shape[1]

    def column_sums(self) -> np.ndarray:
        return self.quotas.sum(axis=0)


@dataclass(frozen=True, eq=False)
class AssignmentPlan:
    point_index: np.ndarray
    cluster_index: np.ndarray
    mass: np.ndarray
    objective: float

    @property
    def flows(self) -> list[tuple[int, int, float]]:
        return list(zip(self.point_index.tolist(), self.cluster_index.tolist(), self.mass.tolist()))

    def cluster_of(self, n_points: int) -> np.ndarray:
        """Cluster label per point for integral single-cluster plans (-1 if split)."""
        labels = np.full(n_points, -1, dtype=np.int64)
        counts = np.bincount(self.point_index, minlength=n_points)
        single = counts[self.point_index] == 1
        labels[self.point_index[single]] = self.cluster_index[single]
        return labels


def _balanced(a: float, b: float) -> bool:
    return abs(a - b) <= BALANCE_RTOL * max(abs(a), abs(b), 1e-300)


def solve_transportation(costs, supplies, demands) -> tuple[np.ndarray, float]:
    """Minimum-cost flow from ``m`` sources to ``k`` sinks.

    Returns the dense ``m x k`` flow matrix and its cost. Integral supplies
    and demands yield an integral flow.
    """
    C = np.asarray(costs, dtype=float)
    s = np.asarray(supplies, dtype=float).ravel()
    d = np.asarray(demands, dtype=float).ravel()
    if C.ndim != 2 or C.shape != (len(s), len(d)):
        raise ValueError(f"costs shape {C.shape} does not match {len(s)} supplies x {len(d)} demands")
    if not (np.all(np.isfinite(C)) and np.all(np.isfinite(s)) and np.all(np.isfinite(d))):
        raise ValueError("costs, supplies and demands must be finite")
    if np.any(s < 0) or np.any(d < 0):
        raise ValueError("supplies and demands must be nonnegative")
    total_s, total_d = float(s.sum()), float(d.sum())
    if total_s == 0 and total_d == 0:
        return np.zeros(C.shape), 0.0
    if not _balanced(total_s, total_d):
        raise ValueError(f"unbalanced: supplies sum to {total_s!r}, demands to {total_d!r}")
    if total_s != total_d:
        d = d * (total_s / total_d)

    m, k = C.shape
    if k == 1:
        flow = s[:, None].copy()
    elif k == 2:
        flow = _two_sinks(C, s, d)
    else:
        flow = _successive_shortest_paths(C, s, d)
    return flow, float(np.sum(flow * C))


def _two_sinks(C: np.ndarray, s: np.ndarray, d: np.ndarray) -> np.ndarray:
    # Everything starts at sink 1; sink 0 takes the cheapest moves first.
    gain = C[:, 0] - C[:, 1]
    order = np.argsort(gain, kind="stable")
    before = np.concatenate(([0.0], np.cumsum(s[order])[:-1]))
    to_first = np.empty_like(s)
    to_first[order] = np.clip(d[0] - before, 0.0, s[order])
    return np.column_stack((to_first, s - to_first))


def _successive_shortest_paths(C: np.ndarray, s: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Insert sources one at a time, routing each along shortest residual paths.

    Paths only ever pass through sinks: a hop ``a -> b`` reroutes mass of some
    source ``p`` currently sent to ``a`` over to ``b`` at price
    ``C[p, b] - C[p, a]``.  The cheapest such ``p`` per ordered sink pair is
    kept in a lazily cleaned heap, so each shortest-path computation is a
    Bellman-Ford pass over ``k`` nodes.
    """
    m, k = C.shape
    cost = C.tolist()
    flow = [[0.0] * k for _ in range(m)]
    room = d.tolist()
    pairs = [(a, b) for a in range(k) for b in range(k) if a != b]
    reroute = {pair: [] for pair in pairs}

    def open_edge(p, a):
        row = cost[p]
        for b in range(k):
            if b != a:
                heapq.heappush(reroute[a, b], (row[b] - row[a], p))

    for i in range(m):
        left = float(s[i])
        while left > 0:
            edges = []
            for a, b in pairs:
                heap = reroute[a, b]
                while heap and flow[heap[0][1]][a] <= 0.0:
                    heapq.heappop(heap)
                if heap:
                    edges.append((a, b, heap[0][0], heap[0][1]))
            dist = list(cost[i])
            via = [None] * k
            for _ in range(k - 1):
                changed = False
                for a, b, w, p in edges:
                    if dist[a] + w < dist[b] - REDUCED_COST_ATOL:
                        dist[b] = dist[a] + w
                        via[b] = (a, p)
                        changed = True
                if not changed:
                    break
            target, best = -1, np.inf
            for j in range(k):
                if room[j] > 0.0 and dist[j] < best:
                    target, best = j, dist[j]
            if target < 0:
                # Only rounding residue of the rescaled demands can remain.
                break

            hops = []
            j = target
            while via[j] is not None:
                a, p = via[j]
                hops.append((a, j, p))
                j = a
            first = j
            delta = min(left, room[target])
            for a, _, p in hops:
                delta = min(delta, flow[p][a])

            if flow[i][first] <= 0.0:
                open_edge(i, first)
            flow[i][first] += delta
            for a, b, p in hops:
                flow[p][a] = 0.0 if flow[p][a] == delta else flow[p][a] - delta
                if flow[p][b] <= 0.0:
                    open_edge(p, b)
                flow[p][b] += delta
            room[target] = 0.0 if room[target] == delta else room[target] - delta
            left = 0.0 if left == delta else left - delta
    return np.array(flow, dtype=float)


def _check_shapes(n_profiles: int, F: ProfileConstraint, C: np.ndarray):
    if F.k != len(C):
        raise ValueError(f"constraint has {F.k} clusters but {len(C)} centers were given")
    if F.n_profiles != n_profiles:
        raise ValueError(f"constraint covers {F.n_profiles} profiles, point set has {n_profiles}")


def evaluate_objective(S: WeightedPointSet | Dataset, F, C, z: int) -> AssignmentPlan:
    """Optimal fractional assignment of ``S`` to centers ``C`` respecting ``F``.

    Raises ``ValueError("infeasible constraint ...")`` when some profile's
    quotas do not add up to that profile's total weight.
    """
    if isinstance(S, Dataset):
        S = S.as_weighted()
    if not isinstance(F, ProfileConstraint):
        F = ProfileConstraint(F)
    C = as_centers(C)
    if z not in (1, 2):
        raise ValueError(f"z must be 1 or 2, got {z}")
    _check_shapes(S.n_profiles, F, C)

    masses = S.class_weights()
    need = F.column_sums()
    for t in range(S.n_profiles):
        if not (need[t] == masses[t] or _balanced(need[t], masses[t])):
            raise ValueError(f"infeasible constraint: profile {t} has mass {float(masses[t])!r} "
                             f"but quotas sum to {float(need[t])!r}")

    pieces_p, pieces_c, pieces_m = [], [], []
    total = 0.0
    for t in range(S.n_profiles):
        idx = S.class_indices(t)
        if len(idx) == 0:
            continue
        costs = distance_power(S.points[idx], C, z)
        flow, value = solve_transportation(costs, S.weights[idx], F.quotas[:, t])
        rows, cols = np.nonzero(flow > 0)
        pieces_p.append(idx[rows])
        pieces_c.append(cols)
        pieces_m.append(flow[rows, cols])
        total += value
    if not pieces_p:
        empty = np.zeros(0, dtype=np.int64)
        return AssignmentPlan(empty, empty, np.zeros(0), 0.0)
    return AssignmentPlan(np.concatenate(pieces_p), np.concatenate(pieces_c).astype(np.int64),
                          np.concatenate(pieces_m), total)


def objective(S, F, C, z: int) -> float:
    return evaluate_objective(S, F, C, z).objective


ORACLE_MAX_POINTS = 12
ORACLE_MAX_ASSIGNMENTS = 2_000_000


def brute_force_objective(X: Dataset, F, C, z: int) -> float:
    """Minimum over every integral assignment of the points satisfying ``F``.

    Enumerates all ``k**n`` labelings; guarded to ``n <= 12``.
    """
    if not isinstance(F, ProfileConstraint):
        F = ProfileConstraint(F)
    C = as_centers(C)
    _check_shapes(X.n_profiles, F, C)
    n, k = X.n, len(C)
    if n > ORACLE_MAX_POINTS or k ** n > ORACLE_MAX_ASSIGNMENTS:
        raise ValueError(f"oracle guard: {k}**{n} assignments is too many to enumerate")
    quotas = np.rint(F.quotas)
    if not np.allclose(F.quotas, quotas, rtol=0, atol=1e-9):
        raise ValueError("infeasible constraint: oracle needs integral quotas")
    if not np.array_equal(quotas.sum(axis=0), X.class_sizes()):
        raise ValueError("infeasible constraint: quotas do not match class sizes")

    costs = distance_power(X.points, C, z)
    if k == 1:
        return float(costs.sum())
    codes = np.arange(k ** n, dtype=np.int64)
    labels = (codes[:, None] // (k ** np.arange(n, dtype=np.int64))) % k
    ok = np.ones(len(codes), dtype=bool)
    for t in range(X.n_profiles):
        members = X.profile_of == t
        for i in range(k):
            ok &= (labels[:, members] == i).sum(axis=1) == quotas[i, t]
    labels = labels[ok]
    if len(labels) == 0:
        raise ValueError("infeasible constraint: no assignment satisfies the quotas")
    values = costs[np.arange(n), labels].sum(axis=1)
    return float(values.min())


def group_level_view(F, profiles: Sequence[GroupProfile], n_groups: int) -> np.ndarray:
    """Collapse profile quotas into the k x l per-group count matrix."""
    if not isinstance(F, ProfileConstraint):
        F = ProfileConstraint(F)
    q = np.rint(F.quotas)
    if not np.allclose(F.quotas, q, rtol=0, atol=1e-9):
        raise ValueError("group_level_view needs integral quotas")
    if len(profiles) != F.n_profiles:
        raise ValueError("one profile per quota column is required")
    out = np.zeros((F.k, n_groups), dtype=np.int64)
    for t, prof in enumerate(profiles):
        for g in prof:
            out[:, g] += q[:, t].astype(np.int64)
    return out
