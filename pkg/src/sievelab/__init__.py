"""Desk-scale laboratory for sieve weights and twin-prime correlation sums."""

from .correlations import (
    CorrelationReport,
    lemma1_check,
    lemma2_check,
    lemma3_sum,
    theorem1_report,
    theorem2_report,
)
from .diagnostics import (
    ApResult,
    TwinCountReport,
    chowla_sum,
    liouville_at_shifted_primes,
    longest_twin_ap,
    pair_density,
    twin_count,
)
from .equidist import EquidistReport, SequenceKind, level_sweep, residue_error
from .errors import CacheError, MemoryBudgetError, RangeError
from .sieve import SieveTable, build_table, load_table, primes_up_to, save_table
from .threshold import ThresholdResult, g, golden_section_u0, optimize, theta_root
from .tuples import (
    KTuple,
    SingularSeriesValue,
    is_admissible,
    nu_m,
    nu_p,
    residue_roots,
    singular_series,
)
from .weights import (
    WeightParams,
    WeightTable,
    derive_weights,
    lambda_R_direct,
    lambda_R_range,
    lambda_R_range_direct,
    load_weight_table,
    save_weight_table,
    weight_table_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ApResult",
    "CacheError",
    "CorrelationReport",
    "EquidistReport",
    "KTuple",
    "MemoryBudgetError",
    "RangeError",
    "SequenceKind",
    "SieveTable",
    "SingularSeriesValue",
    "ThresholdResult",
    "TwinCountReport",
    "WeightParams",
    "WeightTable",
    "build_table",
    "chowla_sum",
    "derive_weights",
    "g",
    "golden_section_u0",
    "is_admissible",
    "lambda_R_direct",
    "lambda_R_range",
    "lambda_R_range_direct",
    "lemma1_check",
    "lemma2_check",
    "lemma3_sum",
    "level_sweep",
    "liouville_at_shifted_primes",
    "load_table",
    "load_weight_table",
    "longest_twin_ap",
    "nu_m",
    "nu_p",
    "optimize",
    "pair_density",
    "primes_up_to",
    "residue_error",
    "residue_roots",
    "save_table",
    "save_weight_table",
    "singular_series",
    "theorem1_report",
    "theorem2_report",
    "theta_root",
    "twin_count",
    "weight_table_to_csv",
]
