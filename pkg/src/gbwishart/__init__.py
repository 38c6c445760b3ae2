"""Bayesian inference for Gaussian concentration graph models.

The package implements generalized Wishart-type priors on the cone of
sparse precision matrices with a fixed vertex ordering, together with
the graph theory (triangulation fill, generalized Bartlett orderings,
covers, prime components, small-order census), a coordinate Gibbs
sampler built on exact quadratic / rational one-dimensional fits of the
trace energy, baseline accept-reject and Metropolis-Hastings samplers,
an exact sampler and closed-form posterior means for decomposable
graphs, and diagnostics (scale-matrix identity check, Stein loss, DIC).
"""

from .graphs import (
    CensusRow,
    FillPattern,
    GBSearchResult,
    Graph,
    OrderedGraph,
    Ordering,
    census,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    enumerate_connected_graphs,
    expand_max_vertex,
    expand_tree,
    find_gb_ordering,
    gb_cover,
    grid_graph,
    is_decomposable,
    is_gb_ordering,
    min_fill_ordering,
    path_graph,
    prime_components,
    star_graph,
    triangulate,
)

from .samplers import (
    ARResult,
    ChainSummary,
    GWishartParams,
    NotGeneralizedBartlettError,
    ar_sample,
    ar_sample_many,
    chain_generator,
    closed_form_mean,
    direct_decomposable_sample,
    direct_sample_many,
    gibbs_run,
    gibbs_run_many,
    merge_chain_summaries,
    mh_run,
    posterior_params,
    triangular_scale_root,
)

from .chol import (
    CholeskyFactor,
    IndependentEntries,
    NotPositiveDefiniteError,
    assemble_omega,
    complete_factor,
    independent_pairs,
    to_original_labels,
    to_rank_space,
)

from .datasim import (
    HubSpec,
    block_diagonal_rule,
    hub_graph,
    omega_from_pattern,
    sample_mvn,
)

from .inference import (
    PosteriorSummary,
    Theorem2Report,
    Theorem2Row,
    dic,
    empirical_delta,
    inverse_diag_delta,
    posterior_mean_and_ci,
    precision_diag_delta,
    stein_loss,
    theorem2_diagnostic,
)

__version__ = "0.1.0"
