"""PAC maximum selection and ranking from noisy pairwise comparisons."""
from .bench import (
    ExperimentRecord,
    ExperimentSpec,
    emit_csv,
    eval_err,
    is_eps_maximum,
    read_csv,
    run_experiment,
)
from .bsr import (
    BsrState,
    IntervalNode,
    binary_search,
    binary_search_ranking,
    build_tree,
    interval_binary_search,
    random_walk,
)
from .duel import CompareParams, budget, compare, compare2
from .estimators import BinarySearchRanker, KnockoutSelector, MergeRanker
from .maxsel import KnockoutParams, knockout, knockout_round, schedule
from .mergerank import merge, merge_rank, rank3, seq_error
from .oracle import (
    AdjacentGapModel,
    BTLModel,
    ComparisonTally,
    MallowsModel,
    MatrixModel,
    ModelPropertyReport,
    Oracle,
    PreferenceModel,
    SingleGapModel,
    make_model,
    mallows_pairwise,
    verify_properties,
)

__version__ = "0.1.0"
