"""Distance analysis of random Apollonian network structures.

Exact enumeration and uniform sampling of the defining ternary trees,
brute-force graph statistics, exact generating-function coefficients for
every distance series, and numeric checks of the asymptotic laws.
"""

from .trees import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    TernaryTree,
    TreeCountTable,
    WordParseError,
    count_trees,
    decode_tree,
    encode_tree,
    enumerate_trees,
    sample_tree,
)
from .graph import (
    CensusTotals,
    DegreeStats,
    DistanceProfile,
    PairClass,
    PairInfo,
    RansGraph,
    bfs_distances,
    build_rans,
    classify_pair,
    corner_distance_labels,
    corner_distance_sum,
    degree_stats,
    distance_profile,
    equidistant_count,
    exhaustive_census,
    mean_pair_distance,
    total_distance_census,
    total_pair_distance,
)
from .series import MarkedSeries, PowerSeries

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
