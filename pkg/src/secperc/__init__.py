"""Secret-correlation percolation toolkit.

Biased secret-bit conversions, the XOR-relay chain protocol, the
honeycomb-to-triangular topology transformation, and bond-percolation Monte
Carlo for verifying where each distribution strategy percolates.
"""

from .chain import (
    ChainSpec,
    SimulationResult,
    exact_success_probability,
    naive_success_probability,
    simulate,
    success_upper_bound,
)
from .errors import ValidationError
from .lattice import (
    NetworkGraph,
    build_honeycomb,
    build_square,
    build_triangular,
    export_graph,
    naive_edge_probability,
    transform_to_triangular,
)
from .oracle import (
    JointDistribution,
    JointEntry,
    UniquenessReport,
    enumerate_chain,
    enumerate_parallel_merge,
    enumerate_transform_step,
    exhaustive_strategy_search,
    verify_secrecy,
    xor_uniqueness_check,
)
from .percolation import (
    ClusterStats,
    CrossingEstimate,
    FAMILIES,
    ThresholdEstimate,
    WindowComparison,
    compare_window,
    connection_probability,
    crossing_probability,
    estimate_threshold,
    family_builder,
    sample_clusters,
    spanning_onsets,
    spanning_probability,
)
from .secret_state import (
    BiasedLink,
    ParallelSuccess,
    PosteriorBranch,
    SecretState,
    coarse_grain,
    conversion_probability,
    majorizes,
    otp_compose,
    parallel_link_success,
    product,
    sbit_probability,
)

__version__ = "0.1.0"
