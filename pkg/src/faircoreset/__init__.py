"""Coresets for fair k-median and k-means clustering with overlapping groups."""

from .core import (CoresetParams, Dataset, GroupProfile, WeightedPointSet, make_profile,
                   moment_error, validate_dataset, weighted_mean)
from .fairflow import (AssignmentPlan, ProfileConstraint, brute_force_objective,
                       evaluate_objective, group_level_view, objective, solve_transportation)
from .harness import (BenchConfig, BenchReport, empirical_error, load_csv, normalize_minmax,
                      run_benchmark, sample_centers, sample_constraint, synthetic_mixture)
from .line_coreset import (LineDataset, means_line_coreset, median_line_coreset,
                           partition_batches, two_point_moment_match)
from .lines import Line, approx_cluster, build_lines, fit_principal_line, project
from .pipeline import (CoresetArtifact, build_fair_coreset, load_coreset, save_coreset,
                       uniform_coreset)

__version__ = "0.1.0"
