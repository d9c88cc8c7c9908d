"""Core-EP inverses of square complex matrices and their perturbation theory."""

__version__ = "0.1.0"

from .acute import AcuteReport, EquivalenceAudit, acute_report, equivalence_audit, rank_excess_certificate
from .blockcore import BlockCoreSpec, assemble_w, block_core_inverse
from .errors import (
    CoreEPError,
    DimensionError,
    ExtractionError,
    GuardError,
    IllConditionedSplitError,
    InconsistencyError,
    NotCoreInvertibleError,
    NumericBreakdownError,
    ParseError,
    PreconditionError,
)
from .geninv import (
    CoreEPDecomposition,
    core_ep_decompose,
    core_ep_inverse,
    core_inverse,
    drazin,
    group_inverse,
    lemma_2_2_audit,
    matrix_index,
    moore_penrose,
    pi_projector,
)
from .io import parse_matrix_file, to_jsonable, write_matrix_json
from .kernel import DEFAULT_TOL, Tolerances, numerical_rank, unitary_nilpotent_split
from .perturb import (
    BoundReport,
    PairContext,
    PerturbationData,
    StabilityReport,
    bounds_report,
    extract_block_form,
    l_matrix,
    perturbation_data,
    reconstruct_theorem_3_4,
    remark_3_7_guards,
    stability_report,
)
from .special import corollary_5_2_apply, remark_5_3_dual_apply, theorem_5_1_apply

