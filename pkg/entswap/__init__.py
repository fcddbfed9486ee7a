from entswap.analysis import (  # noqa: F401
    SchmidtPair,
    bell_fidelity,
    concurrence,
    schmidt_coefficients,
    single_pair_purification_prob,
)
from entswap.bell import BellOutcome, BellRecord, bell_measure_exact, bell_vector  # noqa: F401
from entswap.filtering import (  # noqa: F401
    FilterOutcome,
    FilterPlan,
    FilterPlanError,
    build_filter,
    filter_and_measure,
    plan_filter,
)
from entswap.protocol import (  # noqa: F401
    BranchRecord,
    BranchReport,
    PairSpec,
    PairSpecError,
    PsiCase,
    SampleTally,
    classify_psi_case,
    make_pair,
    run_exact,
    run_sampled,
)
from entswap.statevec import (  # noqa: F401
    LocalOperator,
    StateVector,
    apply_local,
    project_onto,
    tensor,
)

__version__ = "0.1.0"
