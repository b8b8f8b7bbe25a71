"""Geometric types, weighted moments and dataset validation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

GroupProfile = tuple[int, ...]


def make_profile(groups) -> GroupProfile:
    """Canonical profile: the sorted tuple of distinct group indices."""
    profile = tuple(sorted({int(g) for g in groups}))
    if not profile:
        raise ValueError("a group profile must contain at least one group")
    return profile


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"points must be a 2-D array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Points in R^d, each tagged with the id of its group profile.

    ``profiles[t]`` is the set of groups shared by every point with
    ``profile_of == t``; the classes ``X^(t)`` partition the dataset.
    """

    points: np.ndarray
    profile_of: np.ndarray
    profiles: tuple[GroupProfile, ...]
    n_groups: int
    group_names: tuple[str, ...] = ()
    dropped_rows: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points))
        object.__setattr__(self, "profile_of", np.asarray(self.profile_of, dtype=np.int64))
        object.__setattr__(self, "profiles", tuple(tuple(p) for p in self.profiles))

    @classmethod
    def from_groups(cls, points, groups: Sequence, n_groups: int | None = None,
                    group_names: Sequence[str] = ()) -> "Dataset":
        """Build from per-point group collections; profiles are deduplicated
        and numbered in sorted order so ids do not depend on row order."""
        per_point = [make_profile(g) for g in groups]
        profiles = tuple(sorted(set(per_point)))
        index = {p: t for t, p in enumerate(profiles)}
        if n_groups is None:
            n_groups = 1 + max(max(p) for p in profiles) if profiles else 0
        return cls(points, np.array([index[p] for p in per_point], dtype=np.int64),
                   profiles, int(n_groups), tuple(group_names))

    @classmethod
    def single_group(cls, points) -> "Dataset":
        pts = _as_points(points)
        return cls(pts, np.zeros(len(pts), dtype=np.int64), ((0,),), 1)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_profiles(self) -> int:
        return len(self.profiles)

    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.profile_of, minlength=self.n_profiles).astype(float)

    def class_indices(self, t: int) -> np.ndarray:
        return np.flatnonzero(self.profile_of == t)

    def subset(self, mask) -> "Dataset":
        """Restrict to the selected points, dropping profiles left empty."""
        idx = np.flatnonzero(mask) if np.asarray(mask).dtype == bool else np.asarray(mask)
        used = np.unique(self.profile_of[idx])
        remap = {int(t): i for i, t in enumerate(used)}
        return Dataset(self.points[idx],
                       np.array([remap[int(t)] for t in self.profile_of[idx]], dtype=np.int64),
                       tuple(self.profiles[int(t)] for t in used),
                       self.n_groups, self.group_names)

    def as_weighted(self) -> "WeightedPointSet":
        return WeightedPointSet(self.points.copy(), np.ones(self.n),
                                self.profile_of.copy(), self.profiles)

    def checksum(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.points, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.profile_of, dtype="<i8").tobytes())
        h.update(repr(self.profiles).encode())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class WeightedPointSet:
    points: np.ndarray
    weights: np.ndarray
    profile_of: np.ndarray
    profiles: tuple[GroupProfile, ...] = ((0,),)

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "profile_of", np.asarray(self.profile_of, dtype=np.int64))
        object.__setattr__(self, "profiles", tuple(tuple(p) for p in self.profiles))
        if len(self.weights) != len(self.points) or len(self.profile_of) != len(self.points):
            raise ValueError("points, weights and profile_of must have equal length")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")

    @classmethod
    def unweighted(cls, points) -> "WeightedPointSet":
        pts = _as_points(points)
        return cls(pts, np.ones(len(pts)), np.zeros(len(pts), dtype=np.int64))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_profiles(self) -> int:
        return len(self.profiles)

    def class_weights(self) -> np.ndarray:
        return np.bincount(self.profile_of, weights=self.weights, minlength=self.n_profiles)

    def class_indices(self, t: int) -> np.ndarray:
        return np.flatnonzero(self.profile_of == t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedPointSet):
            return NotImplemented
        return (self.profiles == other.profiles
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.profile_of, other.profile_of))

    __hash__ = None


def as_centers(centers) -> np.ndarray:
    """Validate a k x d array of centers (k >= 1, finite)."""
    arr = _as_points(centers)
    if len(arr) < 1:
        raise ValueError("need at least one center")
    if not np.all(np.isfinite(arr)):
        raise ValueError("centers must be finite")
    return arr


@dataclass(frozen=True)
class CoresetParams:
    epsilon: float
    k: int
    z: int = 1
    seed: int = 0
    projection_budget_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.z not in (1, 2):
            raise ValueError(f"z must be 1 or 2, got {self.z}")
        if not self.projection_budget_scale > 0:
            raise ValueError("projection_budget_scale must be positive")


def _weights_of(S):
    if isinstance(S, WeightedPointSet):
        return S.points, S.weights
    pts = _as_points(S)
    return pts, np.ones(len(pts))


def weighted_mean(S) -> np.ndarray:
    """Weight-normalized centroid ``sum w p / sum w``."""
    pts, w = _weights_of(S)
    total = w.sum()
    if len(pts) == 0 or not total > 0:
        raise ValueError("empty set")
    return (w[:, None] * pts).sum(axis=0) / total


def moment_error(S, z: int) -> float:
    """Sum of ``w(p) * d(p, mean)^z`` about the weighted mean."""
    if z not in (1, 2):
        raise ValueError(f"z must be 1 or 2, got {z}")
    pts, w = _weights_of(S)
    mu = weighted_mean(S)
    diff = pts - mu
    if z == 2:
        return float(w @ np.einsum("ij,ij->i", diff, diff))
    return float(w @ np.linalg.norm(diff, axis=1))


def distance_power(points: np.ndarray, centers: np.ndarray, z: int) -> np.ndarray:
    """m x k matrix of ``d(point, center)^z``."""
    diff = points[:, None, :] - centers[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    return sq if z == 2 else np.sqrt(sq)


def validate_dataset(D: Dataset) -> list[str]:
    """Return human-readable violations; an empty list means valid."""
    problems = []
    pts = np.asarray(D.points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] < 1:
        return [f"points must be an n x d array with d >= 1, got shape {pts.shape}"]
    if len(D.profile_of) != len(pts):
        problems.append(f"profile_of has length {len(D.profile_of)}, expected {len(pts)}")
    for i in np.flatnonzero(~np.all(np.isfinite(pts), axis=1)):
        problems.append(f"point {i} has a non-finite coordinate")
    for i, t in enumerate(D.profile_of):
        if not 0 <= t < len(D.profiles):
            problems.append(f"point {i} has dangling profile id {t}")
    for t, prof in enumerate(D.profiles):
        if len(prof) == 0:
            problems.append(f"profile {t} is empty")
        elif any(g < 0 or g >= D.n_groups for g in prof):
            problems.append(f"profile {t} references a group outside [0, {D.n_groups})")
    if len(set(D.profiles)) != len(D.profiles):
        problems.append("profiles are not deduplicated")
    return problems
