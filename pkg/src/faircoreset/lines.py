"""Line scaffolding for the high-dimensional construction.

Points are moved onto a small family of lines whose total projection cost
stays within a budget; each line is then summarized by a 1-D coreset.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import distance_power
from .line_coreset import LineDataset

log = logging.getLogger(__name__)

_CHUNK = 4_000_000


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class Line:
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.direction, dtype=float)
        norm = np.linalg.norm(u)
        if not norm > 0:
            raise ValueError("line direction must be nonzero")
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "direction", u / norm)

    def position(self, points) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.origin) @ self.direction

    def point_at(self, positions) -> np.ndarray:
        t = np.asarray(positions, dtype=float)
        return self.origin + t[..., None] * self.direction

    def residual(self, points) -> np.ndarray:
        diff = np.asarray(points, dtype=float) - self.origin
        along = diff @ self.direction
        perp = diff - along[:, None] * self.direction
        return np.linalg.norm(perp, axis=1)


@dataclass(frozen=True, eq=False)
class ProjectionMap:
    line_index: np.ndarray
    position: np.ndarray
    residual: np.ndarray

    def cost(self, z: int) -> float:
        return float(np.sum(self.residual ** z))


# -- unconstrained clustering ---------------------------------------------

def _seed_centers(X: np.ndarray, k: int, z: int, rng) -> np.ndarray:
    n = len(X)
    chosen = [int(rng.integers(n))]
    closest = distance_power(X, X[chosen], z)[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=closest / total))
        else:
            nxt = int(rng.integers(n))
        chosen.append(nxt)
        closest = np.minimum(closest, distance_power(X, X[nxt:nxt + 1], z)[:, 0])
    return X[chosen].copy()


def assign_nearest(X, centers, z: int) -> tuple[np.ndarray, np.ndarray]:
    """Label of the nearest center per point (ties to the lowest index), and
    the corresponding ``d^z``."""
    cost = distance_power(np.asarray(X, dtype=float), np.asarray(centers, dtype=float), z)
    labels = np.argmin(cost, axis=1)
    return labels, cost[np.arange(len(labels)), labels]


def _lloyd(X, centers, z, max_iter=100):
    for _ in range(max_iter):
        labels, _ = assign_nearest(X, centers, z)
        new = centers.copy()
        for j in range(len(centers)):
            members = X[labels == j]
            if len(members):
                new[j] = members.mean(axis=0) if z == 2 else np.median(members, axis=0)
        if np.array_equal(new, centers):
            break
        centers = new
    labels, dist = assign_nearest(X, centers, z)
    return centers, float(dist.sum())


def approx_cluster(X, k: int, z: int, seed=0, n_init: int = 3) -> tuple[np.ndarray, float]:
    """Unconstrained (k, z)-clustering heuristic: D^z seeding + Lloyd.

    k-means uses centroid updates, k-median coordinate-wise medians. The
    cheapest of ``n_init`` restarts is returned with its cost.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if len(X) < k:
        raise ValueError(f"need at least k={k} points, got {len(X)}")
    if z not in (1, 2):
        raise ValueError(f"z must be 1 or 2, got {z}")
    rng = _rng(seed)
    best = None
    for _ in range(n_init):
        centers, cost = _lloyd(X, _seed_centers(X, k, z, rng), z)
        if best is None or cost < best[1]:
            best = (centers, cost)
    return best


# -- line fitting ----------------------------------------------------------

def _canonical(u: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(u) > 1e-12)
    if len(nz) and u[nz[0]] < 0:
        return -u
    return u


def fit_principal_line(points, weights=None) -> Line:
    """Total-least-squares line: through the weighted centroid along the top
    right singular vector of the centred, sqrt-weighted points."""
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    w = np.ones(len(P)) if weights is None else np.asarray(weights, dtype=float)
    if len(P) == 0:
        raise ValueError("cannot fit a line to zero points")
    centroid = (w[:, None] * P).sum(axis=0) / w.sum()
    centered = np.sqrt(w)[:, None] * (P - centroid)
    axis = np.zeros(P.shape[1])
    axis[0] = 1.0
    if len(P) > 1 and np.any(centered):
        _, sing, vt = np.linalg.svd(centered, full_matrices=False)
        if sing[0] > 0:
            axis = _canonical(vt[0])
    return Line(centroid, axis)


def _residuals(X: np.ndarray, lines: list[Line]) -> np.ndarray:
    """n x m matrix of point-to-line distances, chunked over lines."""
    n, d = X.shape
    out = np.empty((n, len(lines)))
    step = max(1, _CHUNK // max(1, n * d))
    for lo in range(0, len(lines), step):
        chunk = lines[lo:lo + step]
        O = np.stack([ln.origin for ln in chunk])
        U = np.stack([ln.direction for ln in chunk])
        diff = X[:, None, :] - O[None, :, :]
        along = np.einsum("nmd,md->nm", diff, U)
        perp = diff - along[:, :, None] * U[None, :, :]
        out[:, lo:lo + len(chunk)] = np.sqrt(np.einsum("nmd,nmd->nm", perp, perp))
    return out


def project(X, lines: list[Line]) -> tuple[list[LineDataset], ProjectionMap]:
    """Send every point to its nearest line (ties to the lowest index)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if not lines:
        raise ValueError("need at least one line")
    resid = _residuals(X, lines)
    which = np.argmin(resid, axis=1)
    rows = np.arange(len(X))
    position = np.empty(len(X))
    datasets = []
    for j, ln in enumerate(lines):
        idx = np.flatnonzero(which == j)
        t = ln.position(X[idx])
        position[idx] = t
        order = np.argsort(t, kind="stable")
        datasets.append(LineDataset(t[order], ln.origin, ln.direction, idx[order]))
    return datasets, ProjectionMap(which, position, resid[rows, which])


# -- line families -----------------------------------------------------------

class LineCover(NamedTuple):
    lines: list[Line]
    cost: float
    history: list[tuple[int, float]]


def _line_lloyd(X, lines, rounds=10, tol=1e-4):
    prev = None
    for _ in range(rounds):
        resid = _residuals(X, lines)
        which = np.argmin(resid, axis=1)
        cost = float(np.sum(resid[np.arange(len(X)), which] ** 2))
        if prev is not None and prev - cost <= tol * prev:
            break
        prev = cost
        lines = [fit_principal_line(X[which == j]) if np.any(which == j) else ln
                 for j, ln in enumerate(lines)]
    resid = _residuals(X, lines)
    return lines, float(np.sum(resid.min(axis=1) ** 2))


def _split(points: np.ndarray, line: Line) -> list[Line]:
    """Halve a group across its dominant off-line direction and refit."""
    diff = points - line.origin
    perp = diff - np.outer(diff @ line.direction, line.direction)
    _, _, vt = np.linalg.svd(perp, full_matrices=False)
    order = np.argsort(perp @ vt[0], kind="stable")
    half = len(order) // 2
    return [fit_principal_line(points[order[:half]]), fit_principal_line(points[order[half:]])]


def _means_lines(X, centers, budget):
    labels, _ = assign_nearest(X, centers, 2)
    lines = [fit_principal_line(X[labels == j]) for j in range(len(centers)) if np.any(labels == j)]
    lines, cost = _line_lloyd(X, lines)
    history = [(len(lines), cost)]
    while cost > budget:
        resid = _residuals(X, lines)
        which = np.argmin(resid, axis=1)
        grown = []
        for j, ln in enumerate(lines):
            members = X[which == j]
            if len(members) >= 3 and np.sum(resid[which == j, j] ** 2) > 0:
                grown.extend(_split(members, ln))
            elif len(members):
                grown.append(ln)
        if len(grown) == len(lines):
            break
        lines, cost = _line_lloyd(X, grown)
        history.append((len(lines), cost))
    return lines, cost, history


def sphere_net(d: int, eps: float) -> np.ndarray:
    """Unit directions such that every unit vector is within ``eps`` of
    ``+u`` or ``-u`` for some returned ``u``.

    Grid points on the faces of the cube [-1, 1]^d are pushed onto the
    sphere; radial projection is non-expansive outside the unit ball, so a
    face grid of spacing ``2 eps / sqrt(d - 1)`` suffices.
    """
    if d == 1:
        return np.ones((1, 1))
    per_axis = int(np.ceil(np.sqrt(d - 1) / eps)) + 1
    grid = np.linspace(-1.0, 1.0, per_axis)
    dirs = []
    # Faces x_a = +1 cover half the sphere up to sign.
    for a in range(d):
        for rest in itertools.product(grid, repeat=d - 1):
            v = np.insert(np.array(rest), a, 1.0)
            dirs.append(v / np.linalg.norm(v))
    return np.unique(np.round(np.array(dirs), 12), axis=0)


def sphere_net_size(d: int, eps: float) -> int:
    if d == 1:
        return 1
    per_axis = int(np.ceil(np.sqrt(d - 1) / eps)) + 1
    return d * per_axis ** (d - 1)


def _median_lines(X, centers, budget, max_net=50_000):
    labels, dist = assign_nearest(X, centers, 1)
    k, d = centers.shape
    total = float(dist.sum())
    net_eps = min(1.0, budget / total) if total > 0 else 1.0
    cap = sphere_net_size(d, net_eps)

    lines, owner = [], []
    for j in range(k):
        members = X[labels == j]
        if len(members) == 0:
            continue
        offsets = members - centers[j]
        axis = np.eye(d)[0]
        if np.any(offsets):
            _, _, vt = np.linalg.svd(offsets, full_matrices=False)
            axis = _canonical(vt[0])
        lines.append(Line(centers[j], axis))
        owner.append(j)
    resid = _residuals(X, lines).min(axis=1)
    netted = set()
    history = [(len(lines), float(resid.sum()))]
    while resid.sum() > budget:
        p = int(np.argmax(resid))
        if resid[p] <= 1e-12 * max(1.0, total):
            break
        j = int(labels[p])
        rays = sum(1 for o in owner if o == j)
        if j not in netted and rays >= cap and cap <= max_net:
            keep = [i for i, o in enumerate(owner) if o != j]
            lines = [lines[i] for i in keep]
            owner = [owner[i] for i in keep]
            for u in sphere_net(d, net_eps):
                lines.append(Line(centers[j], u))
                owner.append(j)
            netted.add(j)
            resid = _residuals(X, lines).min(axis=1)
        else:
            ray = X[p] - centers[j]
            lines.append(Line(centers[j], ray))
            owner.append(j)
            resid = np.minimum(resid, lines[-1].residual(X))
        history.append((len(lines), float(resid.sum())))
    return lines, float(resid.sum()), history


def projection_budget(z: int, epsilon: float, opt_estimate: float, scale: float = 1.0) -> float:
    if z == 1:
        return epsilon * opt_estimate / 3.0
    return epsilon ** 2 * opt_estimate * scale / 100.0


def build_lines(X, k: int, z: int, budget: float, epsilon: float, seed=0,
                centers=None) -> LineCover:
    """Lines whose projection cost ``sum d^z(x, nearest line)`` is <= budget.

    k-means: line-Lloyd seeded from the approximate clusters, splitting
    every line with positive cost until the budget holds.  k-median: rays
    from the approximate centers, adding the ray toward the worst point;
    a center that reaches the size of an explicit sphere net switches to it.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if not budget > 0:
        raise ValueError("projection budget must be positive")
    if centers is None:
        centers, _ = approx_cluster(X, min(k, len(X)), z, seed)
    centers = np.asarray(centers, dtype=float)
    if z == 2:
        lines, cost, history = _means_lines(X, centers, budget)
    elif z == 1:
        lines, cost, history = _median_lines(X, centers, budget)
    else:
        raise ValueError(f"z must be 1 or 2, got {z}")
    log.debug("line cover: %d lines, cost %.6g, budget %.6g", len(lines), cost, budget)
    return LineCover(lines, cost, history)
