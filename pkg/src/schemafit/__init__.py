"""Schema-evolution validation: match columns across dataset releases."""

from .errors import (
    ConflictError,
    DegenerateVarianceError,
    DomainError,
    GroundTruthError,
    KindError,
    NotFoundError,
    ParseError,
    SchemafitError,
    SpecError,
)
from .evalbench import (
    EvalRow,
    GroundTruth,
    GroundTruthEntry,
    load_ground_truth,
    render_text_table,
    run_accumulated,
    run_year_by_year,
    topk_accuracy,
    write_ground_truth,
)
from .gof import (
    TestResult,
    WeightedSample,
    ad_statistic,
    ad_test,
    f_test,
    from_histogram,
    from_values,
    ks_statistic,
    ks_test,
    permutation_pvalue,
    welch_test,
)
from .ingest import (
    NumericColumn,
    RawColumn,
    Table,
    infer_kind,
    load_table,
    split_columns,
    to_numeric_column,
    write_table,
)
from .matcher import (
    CandidateScore,
    ChangeCounts,
    MatchConfig,
    MatchedPair,
    MatchReport,
    PooledColumn,
    classification_labels,
    classify_changes,
    column_match,
    rank_candidates,
)
from .preprocess import (
    Histogram,
    QuartileSummary,
    build_histogram,
    normalize_histogram,
    pool_years,
    quartiles,
    remove_outliers_iqr,
    shared_edges,
)
from .special import ks_survival, regularized_incomplete_beta
from .synth import ColumnSpec, Mutation, SyntheticSpec, generate_synthetic

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
