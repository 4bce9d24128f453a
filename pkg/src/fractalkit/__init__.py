"""Fractal geometry toolkit for graph collections: box-dimension
estimation via greedy covering, random-centre renormalisation,
dimension-weighted contrastive losses, and the statistical harness
validating the dimension-gap law."""

from .boxdim import (
    BoxCovering,
    DEFAULT_PILOT_SIGMA,
    DimensionEstimate,
    GATE_DIAMETER,
    InsufficientScalesError,
    VarianceLaw,
    box_counts,
    estimate_dimension,
    fit_box_dimension,
    greedy_covering,
    kappa_squared,
    slope_standard_error,
)
from .generators import (
    IgsGraph,
    MotifSpec,
    balanced_tree,
    complete,
    cycle,
    default_motif,
    grid,
    igs_iterate,
    path,
)
from .graphs import (
    ComponentInfo,
    Graph,
    GraphCollection,
    UNREACHABLE,
    ball,
    bfs_distances,
    components,
    diameter,
    disjoint_union,
    graph_from_dict,
    graph_from_json,
    graph_to_json,
    induced_subgraph,
    load_graph_json,
    save_graph_json,
    to_canonical_dict,
)
from .loss import (
    DimensionPairs,
    EmbeddingBatch,
    GraphMeta,
    LemmaRatio,
    LossConfig,
    LossReport,
    anneal_alpha,
    candidate_losses,
    cosine_similarity_matrix,
    exact_fractal_loss,
    lemma_gradient_ratio,
    sample_gaussian_matrix,
    surrogate_fractal_loss,
)
from .renorm import (
    AugmentedView,
    DEFAULT_RADIUS,
    DeltaSample,
    RenormResult,
    augment,
    delta_dimension,
    renormalise,
)
from .rng import RNG_ALGORITHM, SplitMix64, derive_key, standard_normal_from_key
from .stats import (
    GaussianDiagnostics,
    InsufficientDataError,
    VarianceBucket,
    VarianceScalingResult,
    collect_delta,
    gaussian_diagnostics,
    usable_samples,
    variance_scaling_check,
)
from .tu import FormatError, TuParseReport, parse_tu_dataset

__version__ = "0.1.0"
