"""revivalkit: spin chains and lattices with perfect state transfer and
fractional revival, plus brute-force verification of the polynomial and
association-scheme identities behind them."""

from .bivariate_krawtchouk import (
    GriffithsParams,
    Rotation3,
    TratnikParams,
    generating_function_check,
    griffiths_eval,
    orthonormal_eval,
    random_rotation,
    so3_weight,
    tratnik_eval,
    trinomial_weight,
    verify_seven_term,
)
from .chain_dynamics import (
    EigenSystem,
    TransferReport,
    detect_fr,
    detect_pst,
    eigendecompose,
    evolve,
)
from .hamming_scheme import (
    adjacency_apply,
    krawtchouk_eigenvalue_check,
    project_hypercube,
    projection_equivalence,
    verify_bose_mesner,
)
from .ordered_hamming import (
    AmplitudeGrid,
    OrderedWord,
    Shape,
    TriangleOperator,
    closed_form_amplitude,
    column_cardinality,
    detect_2d_transfer,
    project_ordered_walk,
    related_under,
    scheme_adjacency_apply,
    shape_of,
    triangle_hamiltonian,
    verify_ordered_bose_mesner,
)
from .orthopoly import (
    KrawtchoukParams,
    ParaKrawtchoukParams,
    RecurrenceCoefficients,
    evaluate_chi,
    krawtchouk_chain,
    krawtchouk_eval,
    para_krawtchouk_chain,
)
from .spectral_design import (
    FRCertificate,
    FRRejection,
    Spectrum,
    bilattice_spectrum,
    check_fr_condition,
    mirror_symmetric,
    pst_signs,
    reconstruct_jacobi,
)

__version__ = "0.1.0"
