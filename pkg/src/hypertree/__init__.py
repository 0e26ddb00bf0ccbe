"""Determinantal random hypertrees and their local weak limit.

Library layout: `faces` (colex indexing), `boundary` (boundary matrices and
the projection kernel), `exactla` (integer determinants, rank, Smith normal
form), `enumeration` (the exhaustive tiny-scale oracle), `sampler` (exact
and float chain-rule samplers plus a spanning-tree oracle), `skeleton` (the
limit-tree generator), `treestats` (canonical forms, matchings, the limit
formula), `harness` (ball statistics and reports), `cli` (subcommands).
"""

__version__ = "0.1.0"

from .complexes import HypertreeSample
from .enumeration import enumerate_hypertrees, exact_distribution
from .harness import annealed_histogram, compare_report, extract_ball
from .sampler import HypertreeSampler, sample_hypertree, sample_spanning_tree
from .skeleton import generate_skeleton_ball
from .treestats import RootedTree, limit_ball_probability

__all__ = [
    "HypertreeSample",
    "HypertreeSampler",
    "RootedTree",
    "annealed_histogram",
    "compare_report",
    "enumerate_hypertrees",
    "exact_distribution",
    "extract_ball",
    "generate_skeleton_ball",
    "limit_ball_probability",
    "sample_hypertree",
    "sample_spanning_tree",
    "__version__",
]
