"""End-to-end fair coreset construction, the uniform baseline, and coreset files.

Points sharing a group profile never interact under profile-decomposed
constraints, so a fair coreset is the union of independent single-profile
coresets.  Each profile is summarized by projecting onto a line cover and
running the 1-D construction on every line.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import CoresetParams, Dataset, WeightedPointSet
from .line_coreset import coreset_from_batches, line_batches
from .lines import approx_cluster, build_lines, project, projection_budget

UINT64 = 2 ** 64


def profile_rng(seed: int, profile) -> np.random.Generator:
    """Generator keyed by the seed and the profile's group set, so a class
    draws the same stream whether or not other classes are present."""
    return np.random.default_rng([int(seed) % UINT64, len(profile), *(int(g) for g in profile)])


@dataclass(eq=False)
class CoresetArtifact:
    points: WeightedPointSet
    params: CoresetParams | None
    build_log: list = field(default_factory=list)
    source_checksum: str = ""
    method: str = "fair"

    @property
    def size(self) -> int:
        return len(self.points)

    def fingerprint(self) -> str:
        """Content identity ignoring wall-clock timings."""
        log = [{k: v for k, v in entry.items() if k != "elapsed_ms"} for entry in self.build_log]
        return json.dumps({"log": log, "meta": self._meta(), "points": _rows(self.points)},
                          sort_keys=True)

    def _meta(self) -> dict:
        return {
            "method": self.method,
            "params": None if self.params is None else vars(self.params).copy(),
            "profiles": [list(p) for p in self.points.profiles],
            "source_checksum": self.source_checksum,
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoresetArtifact):
            return NotImplemented
        return (self.points == other.points and self._meta() == other._meta()
                and json.dumps(self.build_log, sort_keys=True)
                == json.dumps(other.build_log, sort_keys=True))


def _rows(S: WeightedPointSet) -> list:
    return [[float(w), int(t), *map(float, p)] for w, t, p in zip(S.weights, S.profile_of, S.points)]


def _exact_summary(X: np.ndarray, profile: int) -> WeightedPointSet:
    uniq, counts = np.unique(X, axis=0, return_counts=True)
    return WeightedPointSet(uniq, counts.astype(float), np.full(len(uniq), profile))


def _build_profile(X: np.ndarray, t: int, profile, params: CoresetParams):
    k, z, eps = params.k, params.z, params.epsilon
    rng = profile_rng(params.seed, profile)
    entry = {"profile": t, "groups": list(profile), "n": int(len(X))}
    if len(np.unique(X, axis=0)) <= k:
        entry.update(opt_estimate=0.0, lines=0, batches=[], projection_cost=0.0,
                     budget=0.0, line_history=[])
        return _exact_summary(X, t), entry

    centers, opt = approx_cluster(X, k, z, rng)
    budget = projection_budget(z, eps, opt, params.projection_budget_scale)
    cover = build_lines(X, k, z, budget, eps, rng, centers=centers)
    on_lines, pmap = project(X, cover.lines)
    parts, batch_counts = [], []
    for L in on_lines:
        if len(L) == 0:
            continue
        batches = line_batches(L, k, z, opt, eps)
        batch_counts.append(len(batches))
        parts.append(coreset_from_batches(L, batches, z, t))
    entry.update(opt_estimate=float(opt), budget=float(budget), lines=len(cover.lines),
                 projection_cost=pmap.cost(z), batches=batch_counts,
                 line_history=[[int(m), float(c)] for m, c in cover.history])
    return _concat(parts), entry


def _concat(parts: list[WeightedPointSet], profiles=((0,),)) -> WeightedPointSet:
    return WeightedPointSet(np.vstack([p.points for p in parts]),
                            np.concatenate([p.weights for p in parts]),
                            np.concatenate([p.profile_of for p in parts]), profiles)


def build_fair_coreset(D: Dataset, params: CoresetParams) -> CoresetArtifact:
    """Fair coreset of ``D``: one single-profile coreset per profile class,
    unioned in profile order."""
    sizes = D.class_sizes()
    if np.any(sizes == 0):
        raise ValueError(f"empty profile class: {int(np.flatnonzero(sizes == 0)[0])}")
    parts, log = [], []
    for t, profile in enumerate(D.profiles):
        started = time.perf_counter()
        S_t, entry = _build_profile(D.points[D.class_indices(t)], t, profile, params)
        entry["size"] = len(S_t)
        entry["elapsed_ms"] = (time.perf_counter() - started) * 1e3
        parts.append(S_t)
        log.append(entry)
    return CoresetArtifact(_concat(parts, D.profiles), params, log, D.checksum(), "fair")


def _allocate(sizes: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder apportionment with at least one draw per class."""
    share = total * sizes / sizes.sum()
    alloc = np.maximum(np.floor(share).astype(int), 1)
    alloc = np.minimum(alloc, sizes.astype(int))
    frac = share - np.floor(share)
    while alloc.sum() < total:
        room = alloc < sizes
        t = max(np.flatnonzero(room), key=lambda i: (frac[i], -i))
        alloc[t] += 1
        frac[t] = -1.0
    while alloc.sum() > total:
        spare = np.flatnonzero(alloc > 1)
        t = min(spare, key=lambda i: (frac[i], -alloc[i], i))
        alloc[t] -= 1
        frac[t] = 2.0
    return alloc


def uniform_coreset(D: Dataset, total_size: int, seed: int = 0) -> CoresetArtifact:
    """Per-profile uniform samples sized in proportion to the classes;
    each sample weighted ``n_t / s_t``."""
    sizes = D.class_sizes()
    if total_size < D.n_profiles:
        raise ValueError(f"total_size {total_size} is smaller than the number of profiles {D.n_profiles}")
    total_size = min(int(total_size), D.n)
    alloc = _allocate(sizes, total_size)
    parts, log = [], []
    for t, profile in enumerate(D.profiles):
        idx = D.class_indices(t)
        pick = np.sort(profile_rng(seed, profile).choice(len(idx), size=alloc[t], replace=False))
        w = np.full(alloc[t], sizes[t] / alloc[t])
        parts.append(WeightedPointSet(D.points[idx[pick]], w, np.full(alloc[t], t)))
        log.append({"profile": t, "groups": list(profile), "n": int(sizes[t]), "size": int(alloc[t])})
    return CoresetArtifact(_concat(parts, D.profiles), None, log, D.checksum(), "uniform")


# -- files -------------------------------------------------------------------

def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_coreset(A: CoresetArtifact, path) -> None:
    """Write ``weight,profile,feature_0..`` CSV plus a JSON sidecar holding
    parameters, profiles, checksum and the build log."""
    path = Path(path)
    S = A.points
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["weight", "profile"] + [f"feature_{j}" for j in range(S.dim)])
        for w, t, p in zip(S.weights, S.profile_of, S.points):
            out.writerow([_fmt(w), int(t)] + [_fmt(v) for v in p])
    meta = A._meta()
    meta["dim"] = S.dim
    meta["build_log"] = A.build_log
    with open(sidecar_path(path), "w") as fh:
        json.dump(meta, fh, indent=2)


def load_coreset(path) -> CoresetArtifact:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0]:
        raise ValueError(f"{path}: no header")
    header = rows[0]
    if header[:2] != ["weight", "profile"] or len(header) < 3:
        raise ValueError(f"{path}: line 1: header must start with weight,profile and name at least one feature")
    width = len(header)
    weights, profs, pts = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != width:
            raise ValueError(f"{path}: line {lineno}: expected {width} columns, got {len(row)}")
        try:
            weights.append(float(row[0]))
            profs.append(int(row[1]))
            pts.append([float(v) for v in row[2:]])
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from None

    meta = {}
    if sidecar_path(path).exists():
        with open(sidecar_path(path)) as fh:
            meta = json.load(fh)
    profiles = meta.get("profiles") or [[t] for t in range(max(profs, default=-1) + 1)]
    params = meta.get("params")
    S = WeightedPointSet(np.array(pts, dtype=float).reshape(len(pts), width - 2),
                         np.array(weights), np.array(profs, dtype=np.int64),
                         tuple(tuple(p) for p in profiles))
    return CoresetArtifact(S, None if params is None else CoresetParams(**params),
                           meta.get("build_log", []), meta.get("source_checksum", ""),
                           meta.get("method", "fair"))


def check_artifact(A: CoresetArtifact, D: Dataset, rtol: float = 1e-9) -> list[str]:
    """Invariant violations of a coreset against its source dataset."""
    problems = []
    if A.source_checksum and A.source_checksum != D.checksum():
        problems.append("source checksum does not match the dataset")
    if A.points.profiles != D.profiles:
        problems.append("coreset profiles differ from the dataset's profiles")
        return problems
    if A.points.dim != D.dim:
        problems.append(f"coreset dimension {A.points.dim} differs from dataset dimension {D.dim}")
    if np.any(A.points.weights <= 0):
        problems.append("nonpositive weight")
    got, want = A.points.class_weights(), D.class_sizes()
    for t in range(D.n_profiles):
        if abs(got[t] - want[t]) > rtol * max(1.0, want[t]):
            problems.append(f"profile {t}: coreset weight {float(got[t])!r} != class size {float(want[t])!r}")
    for entry in A.build_log:
        if entry.get("projection_cost", 0.0) > entry.get("budget", np.inf) and entry.get("lines"):
            problems.append(f"profile {entry['profile']}: projection cost exceeds its budget")
    return problems
