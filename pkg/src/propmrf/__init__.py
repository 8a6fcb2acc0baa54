"""Weighted model counting and probabilistic inference for propositional
Markov random fields: models as weighted CNF, exact counting by formula
decomposition and conditioning with a variable elimination fallback, and
importance sampling over formula or variable assignments with belief
propagation proposals."""

from .bench import (
    EnumerationTooLargeError,
    GenSpec,
    brute_force_marginals,
    brute_force_z,
    gen_fs,
    gen_qmr,
    gen_random,
    generate,
    pick_evidence,
    sum_kld,
)
from .bp import (
    BpConfig,
    BpMarginals,
    DegenerateBeliefError,
    formula_proposal,
    run_bp,
    variable_proposal,
)
from .fdc import (
    FORMULA,
    VARIABLE,
    ExactResult,
    InstanceTooLargeError,
    SearchStats,
    canonical_key,
    choose_branch_clause,
    condition_on_clause,
    exact_marginals,
    fdc_count,
    minimal_search_space,
)
from .fis import (
    AllZeroWeightsError,
    Estimate,
    FisResult,
    FormulaAssignment,
    NoConsistentSampleError,
    Sample,
    UFormulaDistribution,
    VisResult,
    enumerate_formula_assignments,
    estimate_from_log_weights,
    estimate_z,
    fis_marginals,
    marginals_from_samples,
    run_fis,
    run_vis,
    u_from_q,
    vis_log_weights,
    vis_marginals,
)
from .graph import Component, WidthEstimate, connected_components, minfill_width, primal_adjacency
from .model import (
    Clause,
    DuplicateVariableError,
    LiteralRangeError,
    MalformedLineError,
    ModelFormatError,
    PropMRF,
    SoftClause,
    TautologyError,
    clause_status,
    conjoin_query,
    model_fingerprint,
    parse_model,
    parse_query,
    write_model,
)
from .sat import PropagationResult, is_satisfiable, unit_propagate
from .simplify import SimplifyOutcome, SimplifyStatus, simplify
from .ve import Factor, VeWidthError, bucket_elimination, clauses_to_factors, ve_count

__version__ = "0.1.0"

__all__ = [
    "AllZeroWeightsError",
    "BpConfig",
    "BpMarginals",
    "Clause",
    "Component",
    "DegenerateBeliefError",
    "DuplicateVariableError",
    "EnumerationTooLargeError",
    "Estimate",
    "ExactResult",
    "FORMULA",
    "Factor",
    "FisResult",
    "FormulaAssignment",
    "GenSpec",
    "InstanceTooLargeError",
    "LiteralRangeError",
    "MalformedLineError",
    "ModelFormatError",
    "NoConsistentSampleError",
    "PropMRF",
    "PropagationResult",
    "Sample",
    "SearchStats",
    "SimplifyOutcome",
    "SimplifyStatus",
    "SoftClause",
    "TautologyError",
    "UFormulaDistribution",
    "VARIABLE",
    "VeWidthError",
    "VisResult",
    "WidthEstimate",
    "brute_force_marginals",
    "brute_force_z",
    "bucket_elimination",
    "canonical_key",
    "clauses_to_factors",
    "choose_branch_clause",
    "clause_status",
    "condition_on_clause",
    "conjoin_query",
    "connected_components",
    "enumerate_formula_assignments",
    "estimate_from_log_weights",
    "estimate_z",
    "exact_marginals",
    "fdc_count",
    "fis_marginals",
    "formula_proposal",
    "gen_fs",
    "gen_qmr",
    "gen_random",
    "generate",
    "is_satisfiable",
    "marginals_from_samples",
    "minfill_width",
    "minimal_search_space",
    "model_fingerprint",
    "parse_model",
    "parse_query",
    "pick_evidence",
    "primal_adjacency",
    "run_bp",
    "run_fis",
    "run_vis",
    "simplify",
    "sum_kld",
    "u_from_q",
    "unit_propagate",
    "variable_proposal",
    "vis_log_weights",
    "vis_marginals",
    "ve_count",
    "write_model",
]
