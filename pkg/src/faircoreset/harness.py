"""Benchmark driver: CSV ingestion, (F, C) sampling and empirical error.

The empirical error of a weighted set ``S`` against ``X`` for one draw of
constraint ``F`` and centers ``C`` is ``|K(S, F, C) / K(X, F, C) - 1|``;
benchmarks report the maximum over many independent draws.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import CoresetParams, Dataset, WeightedPointSet
from .fairflow import ProfileConstraint, objective
from .pipeline import build_fair_coreset, uniform_coreset

MISSING = {"", "na", "nan", "null", "none", "?"}

SAMPLING_NOTE = ("F: uniform random composition of each profile's mass into k parts; "
                 "C: k distinct data points drawn uniformly without replacement; "
                 "all methods in a row share the same (F, C) draws")


@dataclass
class BenchConfig:
    input: str | None
    features: Sequence[str]
    groups: Sequence[str]
    k: int = 3
    z: int = 1
    epsilons: Sequence[float] = (0.1, 0.2, 0.4)
    trials: int = 500
    normalize: bool = False
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for eps in self.epsilons:
            if not 0.0 < eps < 1.0:
                raise ValueError(f"epsilon values must lie in (0, 1), got {eps}")


@dataclass
class BenchRow:
    epsilon: float
    size: int
    uniform_size: int
    error: float
    uniform_error: float
    t_s_ms: float
    t_s_uniform_ms: float
    t_c_ms: float
    t_x_ms: float
    trials: int
    skipped: int


@dataclass
class BenchReport:
    rows: list[BenchRow]
    k: int
    z: int
    seed: int
    trials: int
    n: int
    dim: int
    n_groups: int
    n_profiles: int
    normalized: bool = False
    sampling: str = SAMPLING_NOTE

    def sizes_nonincreasing(self) -> bool:
        rows = sorted(self.rows, key=lambda r: r.epsilon)
        return all(a.size >= b.size for a, b in zip(rows, rows[1:]))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        raw = json.loads(text)
        raw["rows"] = [BenchRow(**r) for r in raw["rows"]]
        return cls(**raw)

    def write(self, prefix) -> tuple[Path, Path]:
        prefix = Path(prefix)
        json_path, csv_path = prefix.with_suffix(".json"), prefix.with_suffix(".csv")
        json_path.write_text(self.to_json())
        names = list(BenchRow.__dataclass_fields__)
        with open(csv_path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(names)
            for row in self.rows:
                out.writerow([format(v, ".17g") if isinstance(v, float) else v
                              for v in (getattr(row, n) for n in names)])
        return json_path, csv_path


# -- ingestion -----------------------------------------------------------------

def load_csv(config) -> Dataset:
    """Read numeric features and categorical group columns from a CSV.

    Each (column, category) pair becomes one group; a row's profile is the
    set of its categories. Rows with a missing or non-numeric selected value
    are dropped and counted in ``Dataset.dropped_rows``.
    """
    path = config.input
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in list(config.features) + list(config.groups):
            if name not in header:
                raise ValueError(f"column not found: {name}")
        points, cats, dropped = [], [], 0
        for row in reader:
            try:
                vals = [float(row[f]) for f in config.features]
            except (TypeError, ValueError):
                dropped += 1
                continue
            labels = [(row[g] or "").strip() for g in config.groups]
            if not all(math.isfinite(v) for v in vals) or any(c.lower() in MISSING for c in labels):
                dropped += 1
                continue
            points.append(vals)
            cats.append(labels)
    if not points:
        raise ValueError(f"{path}: no usable rows ({dropped} dropped)")

    group_id, names = {}, []
    for col_idx, col in enumerate(config.groups):
        for value in sorted({c[col_idx] for c in cats}):
            group_id[col_idx, value] = len(names)
            names.append(f"{col}={value}")
    if not config.groups:
        member = [[0] for _ in cats]
        names = ["all"]
    else:
        member = [[group_id[i, v] for i, v in enumerate(c)] for c in cats]
    D = Dataset.from_groups(np.array(points, dtype=float), member, len(names), names)
    return Dataset(D.points, D.profile_of, D.profiles, D.n_groups, D.group_names, dropped)


def normalize_minmax(D: Dataset) -> Dataset:
    """Affinely map each feature onto [0, 1]; constant features become 0."""
    lo = D.points.min(axis=0)
    span = D.points.max(axis=0) - lo
    scaled = np.zeros_like(D.points)
    live = span > 0
    scaled[:, live] = (D.points[:, live] - lo[live]) / span[live]
    return Dataset(scaled, D.profile_of, D.profiles, D.n_groups, D.group_names, D.dropped_rows)


def synthetic_mixture(n: int = 2000, k: int = 3, dim: int = 2, n_groups: int = 2,
                      seed: int = 0, spread: float = 1.0, separation: float = 6.0) -> Dataset:
    """Gaussian blobs with one group label per point.

    Group membership is skewed per blob so that fairness constraints pull
    against the nearest-center assignment.
    """
    rng = np.random.default_rng(seed)
    means = rng.normal(0.0, separation, size=(k, dim))
    blob = rng.integers(k, size=n)
    pts = means[blob] + rng.normal(0.0, spread, size=(n, dim))
    tilt = rng.dirichlet(np.ones(n_groups) * 0.7, size=k)
    group = np.array([rng.choice(n_groups, p=tilt[b]) for b in blob])
    # every group is represented
    group[:n_groups] = np.arange(n_groups)
    return Dataset.from_groups(pts, [[g] for g in group], n_groups,
                               [f"group={g}" for g in range(n_groups)])


def write_dataset_csv(D: Dataset, path) -> None:
    """Inverse of ``load_csv`` for single-column group data (``x0.., group``)."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow([f"x{j}" for j in range(D.dim)] + ["group"])
        for p, t in zip(D.points, D.profile_of):
            out.writerow([format(v, ".17g") for v in p] + ["+".join(map(str, D.profiles[t]))])


# -- sampling ------------------------------------------------------------------

def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _composition(total: int, k: int, rng) -> np.ndarray:
    bars = np.sort(rng.choice(total + k - 1, size=k - 1, replace=False))
    edges = np.concatenate(([-1], bars, [total + k - 1]))
    return np.diff(edges) - 1


def sample_constraint(D_or_S, k: int, seed=None) -> ProfileConstraint:
    """Uniform random split of every profile's mass across ``k`` clusters.

    Integral masses get a uniform composition (stars and bars); fractional
    masses a flat Dirichlet split.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = _rng(seed)
    masses = D_or_S.class_sizes() if isinstance(D_or_S, Dataset) else D_or_S.class_weights()
    quotas = np.zeros((k, len(masses)))
    for t, mass in enumerate(masses):
        if k == 1:
            quotas[0, t] = mass
        elif abs(mass - round(mass)) <= 1e-9 * max(1.0, mass):
            quotas[:, t] = _composition(int(round(mass)), k, rng)
        else:
            quotas[:, t] = rng.dirichlet(np.ones(k)) * mass
    return ProfileConstraint(quotas)


def sample_centers(D, k: int, seed=None) -> np.ndarray:
    pts = D.points if hasattr(D, "points") else np.asarray(D, dtype=float)
    if len(pts) < k:
        raise ValueError(f"need at least k={k} points to draw centers, got {len(pts)}")
    idx = _rng(seed).choice(len(pts), size=k, replace=False)
    return pts[idx].copy()


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng((int(seed) ^ int(trial)) % 2 ** 64)


# -- empirical error -------------------------------------------------------------

@dataclass
class ErrorResult:
    max_error: float
    errors: list[float]
    skipped: int
    t_x_ms: float
    t_s_ms: float


def paired_errors(X: Dataset, coresets: dict, k: int, z: int, trials: int,
                  seed: int = 0) -> dict[str, ErrorResult]:
    """Empirical errors of several weighted sets on the same (F, C) draws."""
    errors = {name: [] for name in coresets}
    t_s = {name: 0.0 for name in coresets}
    t_x, skipped, evaluated = 0.0, 0, 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        F = sample_constraint(X, k, rng)
        C = sample_centers(X, k, rng)
        started = time.perf_counter()
        base = objective(X, F, C, z)
        t_x += time.perf_counter() - started
        if base == 0:
            skipped += 1
            continue
        evaluated += 1
        for name, S in coresets.items():
            started = time.perf_counter()
            value = objective(S, F, C, z)
            t_s[name] += time.perf_counter() - started
            errors[name].append(abs(value / base - 1.0))
    if evaluated == 0:
        raise ValueError(f"all {trials} trials had a zero objective on the dataset")
    return {name: ErrorResult(max(errs), errs, skipped, t_x * 1e3 / trials,
                              t_s[name] * 1e3 / evaluated)
            for name, errs in errors.items()}


def empirical_error(X: Dataset, S: WeightedPointSet, k: int, z: int, trials: int = 500,
                    seed: int = 0) -> ErrorResult:
    """Maximum of ``|K(S,F,C)/K(X,F,C) - 1|`` over random (F, C) draws.

    Draws with ``K(X, F, C) == 0`` are skipped and counted.
    """
    return paired_errors(X, {"S": S}, k, z, trials, seed)["S"]


def run_benchmark(config: BenchConfig, dataset: Dataset | None = None) -> BenchReport:
    """Per epsilon: build our coreset, a uniform one of the same size, and
    measure both on shared (F, C) draws."""
    D = dataset if dataset is not None else load_csv(config)
    if config.normalize:
        D = normalize_minmax(D)
    rows = []
    for eps in config.epsilons:
        params = CoresetParams(epsilon=eps, k=config.k, z=config.z, seed=config.seed)
        started = time.perf_counter()
        ours = build_fair_coreset(D, params)
        t_c = (time.perf_counter() - started) * 1e3
        uni = uniform_coreset(D, ours.size, config.seed)
        res = paired_errors(D, {"ours": ours.points, "uniform": uni.points},
                            config.k, config.z, config.trials, config.seed)
        rows.append(BenchRow(epsilon=float(eps), size=ours.size, uniform_size=uni.size,
                             error=res["ours"].max_error, uniform_error=res["uniform"].max_error,
                             t_s_ms=res["ours"].t_s_ms, t_s_uniform_ms=res["uniform"].t_s_ms,
                             t_c_ms=t_c, t_x_ms=res["ours"].t_x_ms, trials=config.trials,
                             skipped=res["ours"].skipped))
    report = BenchReport(rows, config.k, config.z, config.seed, config.trials, D.n, D.dim,
                         D.n_groups, D.n_profiles, config.normalize)
    if config.output:
        report.write(config.output)
    return report
