"""Query-complexity bounds and exact oracles for quantum channel discrimination."""

from .channel_divergences import (
    ChannelDivergenceResult,
    Direction,
    InputOptConfig,
    Method,
    amortized_note,
    c_s_channel,
    channel_fidelity,
    channel_fidelity_cq,
    channel_renyi,
    export_sdp_json,
    geometric_channel_fidelity_choi,
    geometric_channel_fidelity_sdp,
    q_s_channel,
)
from .channels import (
    ClassicalChannel,
    CQChannel,
    QuantumChannel,
    apply_channel,
    choi_of,
    embed_classical,
    embed_cq,
    max_entangled,
    pure_state,
    random_instance,
    tensor_power,
)
from .complexity import (
    Bound,
    BoundReport,
    TrivialVerdict,
    Verdict,
    lambda_star,
    qc_asymmetric_bounds,
    qc_mary_bounds,
    qc_precise_bounds,
    qc_symmetric_bounds,
    sc_state_bounds,
    sym_asym_convert,
    trivial_case,
)
from .divergences import (
    FidelityKind,
    RenyiKind,
    bures_and_dfhat,
    fidelity,
    q_hat_s,
    q_s,
    relative_entropy,
    renyi,
    trace_distance,
)
from .errors import (
    CapacityError,
    ChanqueryError,
    DomainError,
    NumericalLimitError,
    SingularSupportError,
    SolverError,
    ValidationError,
)
from .oracle import (
    OracleResult,
    exact_nstar_asymmetric,
    exact_nstar_asymmetric_channel,
    exact_nstar_product_channel,
    exact_nstar_states,
    helstrom_error,
    mary_pgm_error,
    neyman_pearson_beta,
)

__version__ = "0.1.0"
