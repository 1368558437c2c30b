"""Exact Haar-unitary moment calculus and spectral-radius experiments for
random matrices with prescribed singular values."""

from .exact_moments import (
    BoundReport,
    BudgetExceededError,
    CensusReport,
    CountingCheck,
    CrossCheckError,
    composition_census,
    f_i,
    g_i,
    theorem_bound,
    trace_moment_sq,
    trace_moment_uu,
    verify_counting_lemma,
)
from .haar_moments import MomentSpec, entry_moment, mc_entry_moment
from .montecarlo import (
    EigensolverError,
    ExperimentRecord,
    MomentEstimate,
    ProfileFamily,
    RateFit,
    estimate_trace_moment,
    extreme_eigenvalues,
    radius_rate_experiment,
    rng_stream,
    sample_A,
    sample_haar_unitary,
    spectrum_records,
    tail_experiment,
)
from .permutations import (
    IndexTuple,
    MonotoneFactorization,
    Permutation,
    all_permutations,
    canonical_minimal_factorization,
    coset_representatives,
    count_monotone_factorizations,
    enumerate_sk0,
    stabilizer,
    support_window,
)
from .profiles import SingularProfile
from .weingarten import (
    AltBounds,
    WeingartenValue,
    WgBound,
    wg_alt_bounds,
    wg_bound,
    wg_character_table,
    wg_class_table,
    wg_exact,
    wg_series,
)

__all__ = [
    "AltBounds",
    "BoundReport",
    "BudgetExceededError",
    "CensusReport",
    "CountingCheck",
    "CrossCheckError",
    "EigensolverError",
    "ExperimentRecord",
    "IndexTuple",
    "MomentEstimate",
    "MomentSpec",
    "MonotoneFactorization",
    "Permutation",
    "ProfileFamily",
    "RateFit",
    "SingularProfile",
    "WeingartenValue",
    "WgBound",
    "all_permutations",
    "canonical_minimal_factorization",
    "composition_census",
    "coset_representatives",
    "count_monotone_factorizations",
    "enumerate_sk0",
    "entry_moment",
    "estimate_trace_moment",
    "extreme_eigenvalues",
    "f_i",
    "g_i",
    "mc_entry_moment",
    "radius_rate_experiment",
    "rng_stream",
    "sample_A",
    "sample_haar_unitary",
    "spectrum_records",
    "stabilizer",
    "support_window",
    "tail_experiment",
    "theorem_bound",
    "trace_moment_sq",
    "trace_moment_uu",
    "verify_counting_lemma",
    "wg_alt_bounds",
    "wg_bound",
    "wg_character_table",
    "wg_class_table",
    "wg_exact",
    "wg_series",
]
