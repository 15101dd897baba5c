"""rulepick: choose rank-aggregation rules by how consistently they behave
across random splits of the electorate."""

from rulepick._version import __version__
from rulepick.anneal import AnnealConfig, AnnealResult, AnnealStep, anneal
from rulepick.axioms import (
    AxiomOutcome,
    ShuffleSpec,
    check_monotonicity,
    check_psc,
    check_reversal_symmetry,
    check_union_consistency,
    induced_swf,
    preserved_axiom_predicates,
    promote,
    shuffle,
    violation_rate,
    welfare_pick,
)
from rulepick.consistency import (
    DisagreementReport,
    PickResult,
    SplitStats,
    alternative_weights,
    disagreement_on_splits,
    estimate_disagreement,
    exact_disagreement,
    pick_aggregator,
    pick_rule,
    random_split,
    score_split,
    side_profiles,
    split_disagreement,
    split_sequence,
)
from rulepick.core import (
    Profile,
    WeakRanking,
    empty_ranking,
    pairwise_defeats,
    pairwise_matrix,
    position_counts,
    rank_of,
    reverse,
    smith_set,
)
from rulepick.data import (
    DistributionSpec,
    assign_partial,
    emit_profile,
    emit_report,
    parse_event_rankings,
    parse_preflib,
    parse_profile,
    parse_report,
    parse_scores_csv,
    profile_source,
    sample_profile,
)
from rulepick.errors import ResourceLimitError
from rulepick.metrics import (
    jaccard_dissimilarity,
    kt_with_ties,
    max_weighted_kt,
    normalized_disagreement,
    top_k,
    weighted_kt,
)
from rulepick.perfpos import (
    PerfPosAnswer,
    PerfPosInstance,
    decide_perfpos,
    generate_hard_instance,
    reduce_k_perfpos,
    verify_witness,
)
from rulepick.rules import (
    IRV,
    NAMED_FAMILIES,
    SCORE_AGGREGATORS,
    Kemeny,
    PlackettLuceMLE,
    Positional,
    TrimmedBorda,
    aggregate_scores,
    apply_positional,
    apply_rule,
    irv_ranking,
    kemeny_ranking,
    named_vector,
    normalize_vector,
    plackett_luce_mle,
    reverse_rule,
    rule_from_name,
    scores_to_ranking,
    trimmed_borda_ranking,
)

__all__ = [
    "AnnealConfig",
    "AnnealResult",
    "AnnealStep",
    "AxiomOutcome",
    "DisagreementReport",
    "DistributionSpec",
    "IRV",
    "Kemeny",
    "NAMED_FAMILIES",
    "PerfPosAnswer",
    "PerfPosInstance",
    "PickResult",
    "PlackettLuceMLE",
    "Positional",
    "Profile",
    "ResourceLimitError",
    "SCORE_AGGREGATORS",
    "ShuffleSpec",
    "SplitStats",
    "TrimmedBorda",
    "WeakRanking",
    "__version__",
    "aggregate_scores",
    "alternative_weights",
    "anneal",
    "apply_positional",
    "apply_rule",
    "assign_partial",
    "check_monotonicity",
    "check_psc",
    "check_reversal_symmetry",
    "check_union_consistency",
    "decide_perfpos",
    "disagreement_on_splits",
    "emit_profile",
    "emit_report",
    "empty_ranking",
    "estimate_disagreement",
    "exact_disagreement",
    "generate_hard_instance",
    "induced_swf",
    "irv_ranking",
    "jaccard_dissimilarity",
    "kemeny_ranking",
    "kt_with_ties",
    "max_weighted_kt",
    "named_vector",
    "normalize_vector",
    "normalized_disagreement",
    "pairwise_defeats",
    "pairwise_matrix",
    "parse_event_rankings",
    "parse_preflib",
    "parse_profile",
    "parse_report",
    "parse_scores_csv",
    "pick_aggregator",
    "pick_rule",
    "plackett_luce_mle",
    "position_counts",
    "preserved_axiom_predicates",
    "profile_source",
    "promote",
    "random_split",
    "rank_of",
    "reduce_k_perfpos",
    "reverse",
    "reverse_rule",
    "rule_from_name",
    "sample_profile",
    "score_split",
    "scores_to_ranking",
    "shuffle",
    "side_profiles",
    "smith_set",
    "split_disagreement",
    "split_sequence",
    "top_k",
    "trimmed_borda_ranking",
    "verify_witness",
    "violation_rate",
    "welfare_pick",
]
