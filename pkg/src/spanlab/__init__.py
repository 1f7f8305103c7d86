"""spanlab: online metric t-spanner algorithms, adversarial instances, and
exact verification of stretch, lightness, sparsity, and competitive ratios."""

__version__ = "0.1.0"

from .metricspace import L1, L2, FiniteMetric, PointSequence, distance, validate_metric
from .graphs import (
    MetricsReport,
    SpannerGraph,
    StretchReport,
    all_pairs_distances,
    max_stretch,
    metrics_report,
    mst_weight,
    shortest_path_distances,
)
from .cones import ConeCover, aperture_for_epsilon, build_cone_cover
from .gridyao import GridYaoSpanner, run_grid_yao
from .greedy import OrderedGreedy, run_ordered_greedy, spanner_distance_query
from .hst import (
    AlphaRoundedOnline,
    HstOnlineState,
    HstTree,
    MultiScaleSpanner,
    alpha_round,
    alpha_spanner_online,
    multiscale_kappa,
    random_hst,
    run_hst_online,
    run_multiscale,
    ultrametric_violations,
)
from .adversary import (
    OrderedPair,
    ScheduledSequence,
    hypercube_pm1_sequence,
    l1_lattice_sequence,
    manhattan_network,
    ordered_pairs,
    star_append,
    truncated_girth_metric,
    verify_no_via_path,
)
from .bench import ExperimentSpec, offline_greedy, run_experiment, sweep
