"""Dense simulator for Bell-mixture states and LOCC protocols.

The library builds a small family of multi-party mixed states out of Bell
pairs, runs exact branch-enumerated LOCC protocols on them (teleportation,
unlocking, and two-copy distillation), and analyzes entanglement structure
across register cuts via partial-transpose spectra and explicit separability
certificates.
"""

from .analysis import (
    CERT_TOL,
    NPT,
    PPT,
    Bipartition,
    CertificateError,
    CutReport,
    SeparableDecomposition,
    SymmetryReport,
    cut_label,
    cut_survey,
    disconnected_fixture,
    ppt_check,
    product_certificate,
    qubit_map_distance,
    smolin_cut_certificate,
    symmetry_report,
    verify_certificate,
)
from .locc import (
    PRUNE_TOL,
    BellMeasure,
    Branch,
    ConditionalPauli,
    LoccScript,
    LoccValidationError,
    bell_measure,
    run,
    superactivation_for_pair,
    superactivation_script,
    teleport_script,
    unlock_script,
    validate,
)
from .states import (
    M_DE_EXCHANGE,
    M_PAIRING_1,
    M_PAIRING_2,
    M_REGISTER,
    MS_PARTIES,
    BellIndex,
    MixedEnsemble,
    MsDescriptor,
    MsPairPlan,
    PauliIndex,
    bell_state,
    fixture,
    m_state,
    ms_descriptor,
    pauli,
    pauli_on,
    smolin_state,
)
from .tensor import (
    ABS_TOL,
    DensityOperator,
    LocalOperator,
    PureState,
    QubitId,
    Register,
    apply_local,
    eig_hermitian,
    fidelity_pure,
    kron,
    partial_trace,
    partial_transpose,
    permute_qubits,
    reorder_register,
)

__version__ = "0.1.0"
